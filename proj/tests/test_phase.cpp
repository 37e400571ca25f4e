#include <catch2/catch_amalgamated.hpp>

#include <usc/phase.hpp>

using namespace usc;

TEST_CASE("dimer sweep: zeros until the broken branch wins", "[phase]") {
    // grid-scan oracle: at each g the reported branch energy must equal the
    // global minimum of the classical landscape over a box scan
    ModelSpec tpl = make_dimer(1.0, 1.0, 0.1, 0.1, 1.0);
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(9, 0.0, 2.0);
    auto t = sweep_displacements(tpl, grid);
    for (Eigen::Index r = 0; r < grid.size(); ++r) {
        REQUIRE(t.column("stable")[r] == 1.0);
        REQUIRE(t.column("residual_norm")[r] < 1e-10);
        const ModelSpec spec = with_homogeneous_coupling(tpl, grid[r]);
        double best = 1e300;
        for (double a = -6.0; a <= 6.0; a += 0.02)
            for (double b = -6.0; b <= 6.0; b += 0.02) {
                Eigen::VectorXd x(2);
                x << a, b;
                best = std::min(best, classical_energy(spec, x));
            }
        REQUIRE(t.column("energy")[r] == Catch::Approx(best).margin(1e-3));
        // below threshold g < w/2 the minimum is the origin
        if (grid[r] < 0.45) REQUIRE(t.column("alpha_abs_0")[r] < 1e-8);
        if (grid[r] > 0.55) REQUIRE(t.column("alpha_abs_0")[r] > 0.1);
    }
}

TEST_CASE("trimer sweep is continuous, increasing, accurate", "[phase]") {
    ModelSpec tri;
    tri.modes = {{1.0, 0.01}, {2.0, 0.02}, {4.0, 0.04}};
    tri.set_mode_mode(0, 1, 1.0);
    tri.set_mode_mode(0, 2, 1.0);
    tri.set_mode_mode(1, 2, 1.0);
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(41, 0.0, 20.0);
    auto t = sweep_displacements(tri, grid);
    REQUIRE(t.column("residual_norm").maxCoeff() < 1e-10);
    REQUIRE(t.column("stable").minCoeff() == 1.0);
    for (int m = 0; m < 3; ++m) {
        const auto& col = t.column("alpha_abs_" + std::to_string(m));
        for (Eigen::Index r = 1; r < grid.size(); ++r)
            REQUIRE(col[r] >= col[r - 1] - 1e-9);
    }
}

TEST_CASE("symmetric dimer sweep endpoint matches the USC formula", "[phase]") {
    ModelSpec tpl = make_dimer(1.0, 1.0, 0.1, 0.1, 1.0);
    Eigen::VectorXd grid(3);
    grid << 10.0, 100.0, 1000.0;
    auto t = sweep_displacements(tpl, grid);
    const double a2 = t.column("alpha_abs_0")[2] * t.column("alpha_abs_0")[2];
    REQUIRE(std::abs(a2 * std::pow(0.1 * 0.1 * 0.1 * 0.1, 0.25) / 1000.0 - 1.0) < 0.01);
}

TEST_CASE("sweep preconditions", "[phase]") {
    ModelSpec tpl = make_dimer(1.0, 1.0, 0.1, 0.1, 1.0);
    Eigen::VectorXd bad(2);
    bad << 1.0, 0.5;
    REQUIRE_THROWS_AS(sweep_displacements(tpl, bad), ConfigError);
}

TEST_CASE("lambda scan: normal and superradiant phases", "[phase]") {
    ScaledFamily f;
    f.family = Family::rabi_type;
    f.omega1 = 1.0;
    f.omega2 = 1.0;
    f.eps1 = 0.1;
    f.eps2 = 0.1;
    Eigen::VectorXd lg(3);
    lg << 0.9, 1.05, 1.2;
    auto t = lambda_scan(f, {1000.0}, lg);
    REQUIRE(t.column("alpha2_over_N")[0] < 1e-6);       // normal phase
    REQUIRE(t.column("alpha2_over_N")[2] ==
            Catch::Approx((1.2 * 1.2 - 1.0) / 0.2).epsilon(0.01));
    // second-order signature: order parameter shrinks toward the transition
    REQUIRE(t.column("alpha2_over_N")[1] < t.column("alpha2_over_N")[2]);
    REQUIRE(t.column("alpha2_over_N")[1] > 0.0);
    // beta/alpha sqrt(N) -> -2 g / w2 with g = lambda sqrt(w1 w2)/2
    REQUIRE(t.column("beta_over_alpha_sqrtN")[2] ==
            Catch::Approx(-2.0 * (1.2 * 0.5) / 1.0).epsilon(0.01));
    REQUIRE_THROWS_AS(lambda_scan(f, {}, lg), ConfigError);
    ScaledFamily d2 = f;
    d2.family = Family::two_atom_dicke;
    REQUIRE_THROWS_AS(lambda_scan(d2, {10.0}, lg), ConfigError);
}

TEST_CASE("lambda scan ED cross-check at desk scale", "[phase]") {
    ScaledFamily f;
    f.family = Family::dicke_type;
    f.omega1 = 1.0;
    f.omega2 = 1.0;
    f.eps1 = 0.2;
    f.eps2 = 0.2;
    Eigen::VectorXd lg(2);
    lg << 1.6, 2.0;
    LambdaScanOptions opt;
    opt.ed_max_N = 6.0;
    auto t = lambda_scan(f, {6.0}, lg, opt);
    for (Eigen::Index r = 0; r < t.grid.size(); ++r) {
        REQUIRE(std::isfinite(t.column("ed_nph_over_N")[r]));
        REQUIRE(t.column("ed_nph_over_N")[r] ==
                Catch::Approx(t.column("alpha2_over_N")[r]).margin(0.25));
        REQUIRE(t.column("gap")[r] > 0.0);
    }
}

TEST_CASE("first-order crossing analytics and finite-size jump", "[phase]") {
    ScaledFamily f;
    f.family = Family::two_atom_dicke;
    f.omega = 1.0;
    f.omega_q = 0.05;
    f.g = 0.5;
    f.N = 10.0;
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(8, 0.1, 1.2);
    auto res = first_order_crossing(f, grid);
    REQUIRE(res.analytic_crossing == Catch::Approx(two_atom_crossing(f)).margin(1e-9));
    REQUIRE(res.ed_crossing == Catch::Approx(res.analytic_crossing).margin(0.01));
    const double jump_scale = 4.0 * f.N * (f.g / f.omega) * (f.g / f.omega);
    REQUIRE(res.ed_jump > 0.9 * jump_scale);
    // block energies on the table cross where claimed
    const auto& ep = res.table.column("E_par");
    const auto& eo = res.table.column("E_orth");
    for (Eigen::Index r = 0; r < grid.size(); ++r) {
        // displaced (parallel) sector wins below the crossing, dark above
        if (grid[r] < res.analytic_crossing - 0.05) REQUIRE(ep[r] < eo[r]);
        if (grid[r] > res.analytic_crossing + 0.05) REQUIRE(eo[r] < ep[r]);
    }
    Eigen::VectorXd off(3);
    off << 1.2, 1.3, 1.4;  // does not straddle
    REQUIRE_THROWS_AS(first_order_crossing(f, off), ConfigError);
}

TEST_CASE("splitting curve: bounded model first-order-in-1/g ratio", "[phase]") {
    ModelSpec b;
    b.spins = {{1.0}, {1.0}};
    b.set_spin_spin(0, 1, 1.0);
    Eigen::VectorXd grid(2);
    grid << 10.0, 100.0;
    SplittingOptions opt;
    opt.tol_rel = 3e-3;  // cluster scale set by wq^2/g against spread ~ 2g
    auto t = splitting_curve(b, grid, FramePolicy::lab, opt);
    REQUIRE(t.column("doublet")[0] == 1.0);
    REQUIRE(t.column("doublet")[1] == 1.0);
    const double ratio = t.column("splitting")[0] / t.column("splitting")[1];
    REQUIRE(ratio == Catch::Approx(10.0).epsilon(0.01));
    REQUIRE(t.column("parity_lo")[1] == Catch::Approx(-1.0).margin(1e-8));
    REQUIRE(t.column("parity_hi")[1] == Catch::Approx(1.0).margin(1e-8));
}

TEST_CASE("splitting curve: dimer deep wells and g=0", "[phase]") {
    ModelSpec tpl = make_dimer(1.0, 1.0, 0.1, 0.1, 1.0);
    Eigen::VectorXd grid(2);
    grid << 5.0, 20.0;
    auto t = splitting_curve(tpl, grid, FramePolicy::auto_displaced);
    REQUIRE(t.column("doublet")[0] == 1.0);
    REQUIRE(t.column("doublet")[1] == 1.0);
    // deep-well tunneling is below double resolution at both points
    REQUIRE(std::abs(t.column("splitting")[1]) <=
            std::abs(t.column("splitting")[0]) + 1e-12);
    REQUIRE(t.column("parity_lo")[1] == Catch::Approx(-1.0).margin(1e-6));
    REQUIRE(t.column("parity_hi")[1] == Catch::Approx(1.0).margin(1e-6));

    // g = 0: generic nondegenerate, no doublet flagged
    ModelSpec free = make_dimer(1.0, 1.7, 0.1, 0.1, 1.0);
    Eigen::VectorXd zero(2);
    zero << 0.0, 0.1;
    auto t0 = splitting_curve(free, zero, FramePolicy::auto_displaced);
    REQUIRE(t0.column("doublet")[0] == 0.0);
}

TEST_CASE("sweep metadata reproduces the table bit-identically", "[phase]") {
    ModelSpec tpl = make_dimer(1.0, 1.0, 0.1, 0.1, 1.0);
    Eigen::VectorXd grid = Eigen::VectorXd::LinSpaced(5, 0.0, 2.0);
    auto t1 = sweep_displacements(tpl, grid);
    auto t2 = sweep_displacements(tpl, grid);
    for (const auto& name : t1.column_order) {
        const auto& x = t1.column(name);
        const auto& y = t2.column(name);
        for (Eigen::Index r = 0; r < x.size(); ++r) {
            if (std::isnan(x[r])) REQUIRE(std::isnan(y[r]));
            else REQUIRE(x[r] == y[r]);
        }
    }
    REQUIRE(t1.metadata == t2.metadata);
}
