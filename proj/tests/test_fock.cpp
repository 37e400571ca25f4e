#include <catch2/catch_amalgamated.hpp>

#include <usc/fock.hpp>

using namespace usc;

TEST_CASE("basis indexing round-trips", "[fock]") {
    auto b = build_basis({3, 4}, 2);
    REQUIRE(b->dimension == 3 * 4 * 2 * 2);
    for (Index i = 0; i < b->dimension; ++i) {
        std::vector<int> n(2), s(2);
        for (int m = 0; m < 2; ++m) n[m] = b->occupation(i, m);
        for (int q = 0; q < 2; ++q) s[q] = b->spin_bit(i, q);
        REQUIRE(b->index_of(n, s) == i);
    }
}

TEST_CASE("basis validation", "[fock]") {
    REQUIRE_THROWS_AS(build_basis({1}, 0), ConfigError);
    REQUIRE_THROWS_AS(build_basis({100000, 100000, 100000}, 0), DimensionCapError);
}

TEST_CASE("ladder matrix elements", "[fock]") {
    auto b = build_basis({5}, 0);
    auto a = ladder_op(b, 0, Ladder::annihilate);
    auto ad = ladder_op(b, 0, Ladder::create);
    // a|n> = sqrt(n)|n-1>
    for (int n = 1; n < 5; ++n)
        REQUIRE(a.mat.coeff(n - 1, n) == Catch::Approx(std::sqrt(double(n))));
    // [a, a†] = 1 away from the truncation edge
    SparseMat comm = a.mat * ad.mat - ad.mat * a.mat;
    for (int n = 0; n < 4; ++n) REQUIRE(comm.coeff(n, n) == Catch::Approx(1.0));
    REQUIRE(max_abs(SparseMat(SparseMat(ad.mat * a.mat) -
                              ladder_op(b, 0, Ladder::number).mat)) < 1e-14);
}

TEST_CASE("displaced ladder operators", "[fock]") {
    auto b = build_basis({6}, 0);
    const double alpha = 0.7;
    auto n_d = ladder_op(b, 0, Ladder::number, alpha);
    SparseMat expected = ladder_op(b, 0, Ladder::number).mat +
                         alpha * ladder_op(b, 0, Ladder::quadrature).mat;
    SparseMat shift(b->dimension, b->dimension);
    shift.setIdentity();
    REQUIRE(max_abs(SparseMat(n_d.mat - expected - alpha * alpha * shift)) < 1e-14);
    // <0|(a†+alpha)(a+alpha)|0> = alpha^2
    Eigen::VectorXd vac = Eigen::VectorXd::Zero(b->dimension);
    vac[0] = 1.0;
    REQUIRE(vac.dot(n_d.mat * vac) == Catch::Approx(alpha * alpha));
}

TEST_CASE("spin operators square to identity and anticommute", "[fock]") {
    auto b = build_basis({2}, 1);
    auto sx = spin_op(b, 0, Axis::x);
    auto sz = spin_op(b, 0, Axis::z);
    SparseMat I(b->dimension, b->dimension);
    I.setIdentity();
    REQUIRE(max_abs(SparseMat(SparseMat(sx.mat * sx.mat) - I)) < 1e-15);
    REQUIRE(max_abs(SparseMat(SparseMat(sz.mat * sz.mat) - I)) < 1e-15);
    REQUIRE(max_abs(SparseMat(sx.mat * sz.mat + sz.mat * sx.mat)) < 1e-15);
}

TEST_CASE("parity operator", "[fock]") {
    auto b = build_basis({3}, 1);
    auto P = parity_op(b);
    // (-1)^n * sigma_z diagonal
    for (Index i = 0; i < b->dimension; ++i) {
        const int n = b->occupation(i, 0);
        const int s = b->spin_bit(i, 0);
        const double expect = ((n % 2) ? -1.0 : 1.0) * (s ? -1.0 : 1.0);
        REQUIRE(P.mat.coeff(i, i) == expect);
    }
    SparseMat I(b->dimension, b->dimension);
    I.setIdentity();
    REQUIRE(max_abs(SparseMat(SparseMat(P.mat * P.mat) - I)) == 0.0);
}
