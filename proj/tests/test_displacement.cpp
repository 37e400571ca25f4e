#include <catch2/catch_amalgamated.hpp>

#include <usc/displacement.hpp>

using namespace usc;

namespace {

// independent oracle for the k-equation via the substitution u = k^(2/3):
// u^4 + u - 2^(1/3) = 0, bisected
double k_bisection_oracle() {
    auto f = [](double u) { return u * u * u * u + u - std::cbrt(2.0); };
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (f(lo) * f(mid) <= 0.0 ? hi : lo) = mid;
    }
    return std::pow(0.5 * (lo + hi), 1.5);
}

}  // namespace

TEST_CASE("k-root equation", "[displacement]") {
    const double k = solve_k();
    REQUIRE(std::abs(std::pow(k, 8.0 / 3.0) + std::pow(k, 2.0 / 3.0) - std::cbrt(2.0)) <
            1e-12);
    REQUIRE(k == Catch::Approx(0.74).margin(0.005));
    REQUIRE(std::abs(k - k_bisection_oracle()) < 1e-10);
    // equivalent closed form: k^2 (1 + k^2)^3 = 2
    REQUIRE(k * k * std::pow(1.0 + k * k, 3.0) == Catch::Approx(2.0).margin(1e-10));
}

TEST_CASE("stationarity residual against finite differences", "[displacement]") {
    ModelSpec s = make_dimer(1.0, 2.0, 0.05, 0.08, 0.9);
    Eigen::VectorXd a(2);
    a << 0.7, -1.3;
    const double h = 1e-5;
    Eigen::VectorXd r = stationarity_residual(s, a);
    Eigen::MatrixXd J = stationarity_jacobian(s, a);
    for (int i = 0; i < 2; ++i) {
        Eigen::VectorXd ap = a, am = a;
        ap[i] += h;
        am[i] -= h;
        // residual is half the energy gradient
        const double grad = (classical_energy(s, ap) - classical_energy(s, am)) / (2.0 * h);
        REQUIRE(r[i] == Catch::Approx(0.5 * grad).margin(1e-6));
        const Eigen::VectorXd dr =
            (stationarity_residual(s, ap) - stationarity_residual(s, am)) / (2.0 * h);
        REQUIRE((J.col(i) - dr).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("symmetric dimer closed form", "[displacement]") {
    // w1=w2=w, e1=e2=e: the broken branch satisfies alpha^2 = (2g - w)/(2e)
    const double w = 1.0, e = 0.2, g = 2.0;
    ModelSpec s = make_dimer(w, w, e, e, g);
    auto sols = solve_displacements(s, asymptotic_seed(s));
    REQUIRE(!sols.empty());
    const auto& best = sols.front();
    REQUIRE(best.stable);
    REQUIRE(best.residual_norm < 1e-10);
    REQUIRE(best.alphas[0] * best.alphas[0] ==
            Catch::Approx((2.0 * g - w) / (2.0 * e)).margin(1e-9));
    REQUIRE(best.alphas[0] * best.alphas[1] < 0.0);
    // the +- partner is present with identical energy
    bool mirror = false;
    for (const auto& sol : sols)
        if ((sol.alphas + best.alphas).norm() < 1e-8 && sol.energy == best.energy)
            mirror = true;
    REQUIRE(mirror);
}

TEST_CASE("dimer USC asymptote", "[displacement]") {
    const double e1 = 0.1, e2 = 0.1;
    double prev_dev = 1e300;
    for (double g : {1e2, 1e3, 1e4}) {
        ModelSpec s = make_dimer(1.0, 1.0, e1, e2, g);
        auto sols = solve_displacements(s, asymptotic_seed(s));
        REQUIRE(sols.front().stable);
        const double a2 = sols.front().alphas[0] * sols.front().alphas[0];
        const double dev = std::abs(a2 * std::pow(e1 * e1 * e1 * e2, 0.25) / g - 1.0);
        REQUIRE(dev < prev_dev);  // monotone approach
        prev_dev = dev;
        if (g >= 1e3) {
            REQUIRE(dev < 0.01);
            const double ratio = sols.front().alphas[1] / sols.front().alphas[0];
            REQUIRE(std::abs(ratio + std::pow(e1 / e2, 0.25)) < 1e-3);
        }
    }
}

TEST_CASE("trimer asymptotic branch", "[displacement]") {
    // symmetric trimer: two sites share alpha, the third goes to gamma with
    // gamma/alpha -> -(1 + k^2)
    const double k = solve_k();
    const double g = 1e4;
    ModelSpec s = make_symmetric_chain(3, 1.0, 0.1, g);
    auto sols = solve_displacements(s, asymptotic_seed(s));
    REQUIRE(!sols.empty());
    const auto& best = sols.front();
    REQUIRE(best.stable);
    REQUIRE(best.residual_norm < 1e-8 * g);
    // identify the lone (opposite-sign) site
    Eigen::VectorXd a = best.alphas;
    int lone = -1;
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3, l = (i + 2) % 3;
        if (a[j] * a[l] > 0.0 && a[i] * a[j] < 0.0) lone = i;
    }
    REQUIRE(lone >= 0);
    const int other = (lone + 1) % 3;
    REQUIRE(std::abs(a[lone] / a[other]) == Catch::Approx(1.0 + k * k).margin(0.02));
    // paired sites approach k sqrt(g/e)
    REQUIRE(std::abs(a[other]) ==
            Catch::Approx(k * std::sqrt(g / 0.1)).epsilon(0.01));
}

TEST_CASE("newton solver basics", "[displacement]") {
    ModelSpec s = make_dimer(1.0, 1.0, 0.2, 0.2, 2.0);
    Eigen::VectorXd seed(2);
    seed << 2.0, -2.0;
    auto root = newton_solve(s, seed);
    REQUIRE(root.has_value());
    REQUIRE(stationarity_residual(s, *root).norm() < 1e-10);
    // origin stays at origin
    auto zero = newton_solve(s, Eigen::VectorXd::Zero(2));
    REQUIRE(zero.has_value());
    REQUIRE(zero->norm() < 1e-12);
}

TEST_CASE("solutions are deduplicated, signed pairs, energy-sorted", "[displacement]") {
    ModelSpec s = make_dimer(1.0, 1.0, 0.15, 0.15, 1.4);
    auto sols = solve_displacements(s, asymptotic_seed(s));
    for (std::size_t i = 1; i < sols.size(); ++i)
        REQUIRE(sols[i - 1].energy <= sols[i].energy);
    for (std::size_t i = 0; i < sols.size(); ++i)
        for (std::size_t j = i + 1; j < sols.size(); ++j)
            REQUIRE((sols[i].alphas - sols[j].alphas).norm() > 1e-7);
    for (const auto& sol : sols) {
        REQUIRE(sol.branch_id == detail::branch_label(sol.alphas));
        if (sol.alphas.norm() < 1e-9) continue;
        bool mirror = false;
        for (const auto& other : sols)
            if ((other.alphas + sol.alphas).norm() < 1e-8) mirror = true;
        REQUIRE(mirror);
    }
}

TEST_CASE("seed guards", "[displacement]") {
    ModelSpec s = make_dimer(1.0, 1.0, 0.0, 0.1, 2.0);
    REQUIRE_THROWS_AS(asymptotic_seed(s), ConfigError);  // epsilon = 0
    ModelSpec chain = make_symmetric_chain(4, 1.0, 0.1, 1.0);
    REQUIRE_THROWS_AS(asymptotic_seed(chain), ShapeError);  // only 2 or 3 sites
}
