// phase.hpp — parameter sweeps and critical-point extraction: displacement
// branches vs. coupling, doublet-splitting curves, lambda scans of the
// scaled families, and the first-order crossing of the two-atom model.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "usc/bogoliubov.hpp"
#include "usc/displacement.hpp"
#include "usc/eigensolve.hpp"
#include "usc/errors.hpp"
#include "usc/fock.hpp"
#include "usc/models.hpp"

namespace usc {

struct SweepTable {
    std::string axis_name;
    Eigen::VectorXd grid;
    std::vector<std::string> column_order;
    std::map<std::string, Eigen::VectorXd> data;  // node-stable storage
    nlohmann::json metadata;

    Eigen::VectorXd& add_column(const std::string& name) {
        auto [it, fresh] = data.emplace(
            name, Eigen::VectorXd::Constant(grid.size(),
                                            std::numeric_limits<double>::quiet_NaN()));
        if (!fresh) throw ShapeError("SweepTable: duplicate column " + name);
        column_order.push_back(name);
        return it->second;
    }
    const Eigen::VectorXd& column(const std::string& name) const {
        auto it = data.find(name);
        if (it == data.end()) throw ShapeError("SweepTable: no column named " + name);
        return it->second;
    }
    void check() const {
        for (const auto& [n, v] : data)
            if (v.size() != grid.size())
                throw ShapeError("SweepTable: column " + n + " length mismatch");
    }
};

inline nlohmann::json spec_to_json(const ModelSpec& spec) {
    nlohmann::json j;
    j["modes"] = nlohmann::json::array();
    for (const auto& m : spec.modes)
        j["modes"].push_back({{"omega", m.omega}, {"epsilon", m.epsilon}});
    j["spins"] = nlohmann::json::array();
    for (const auto& s : spec.spins) j["spins"].push_back({{"omega_q", s.omega_q}});
    auto pairs = [](const std::map<PairKey, double>& m) {
        nlohmann::json a = nlohmann::json::array();
        for (const auto& [k, v] : m) a.push_back({k.first, k.second, v});
        return a;
    };
    j["mode_mode"] = pairs(spec.mode_mode);
    j["mode_spin"] = pairs(spec.mode_spin);
    j["spin_spin"] = pairs(spec.spin_spin);
    return j;
}

inline nlohmann::json family_to_json(const ScaledFamily& f) {
    static const char* names[] = {"dicke_type", "rabi_type", "two_atom_dicke"};
    return {{"family", names[static_cast<int>(f.family)]},
            {"omega1", f.omega1}, {"omega2", f.omega2},
            {"eps1", f.eps1},     {"eps2", f.eps2},
            {"omega", f.omega},   {"omega_q", f.omega_q},
            {"g", f.g},           {"control", f.control},
            {"N", f.N}};
}

// Same spec with every coupling's magnitude replaced by g (signs kept).
inline ModelSpec with_homogeneous_coupling(const ModelSpec& tpl, double g) {
    ModelSpec s = tpl;
    auto apply = [g](std::map<PairKey, double>& m) {
        for (auto& [k, v] : m) v = (v < 0.0) ? -g : g;
    };
    apply(s.mode_mode);
    apply(s.mode_spin);
    apply(s.spin_spin);
    return s;
}

namespace detail {

inline void require_ascending(const Eigen::VectorXd& grid, const char* who) {
    for (Eigen::Index i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw ConfigError(std::string(who) + ": grid must be strictly ascending");
}

inline nlohmann::json solve_options_json(const SolveOptions& o) {
    return {{"tol", o.newton.tol},
            {"max_iterations", o.newton.max_iterations},
            {"max_backtracks", o.newton.max_backtracks},
            {"dedup_distance", o.dedup_distance},
            {"extra_box_seeds", o.extra_box_seeds}};
}

}  // namespace detail

struct SweepOptions {
    SolveOptions solve;
    double jump_factor{10.0};  // branch-switch detector threshold
};

// Lowest-energy stable displacement branch vs. homogeneous coupling, with
// continuation seeding along the grid.
inline SweepTable sweep_displacements(const ModelSpec& tpl, const Eigen::VectorXd& g_grid,
                                      const SweepOptions& opt = {}) {
    if (tpl.n_spins() != 0)
        throw ConfigError("sweep_displacements: bosonic specs only");
    detail::require_ascending(g_grid, "sweep_displacements");
    tpl.validate();

    SweepTable t;
    t.axis_name = "g";
    t.grid = g_grid;
    const int n = tpl.n_modes();
    std::vector<Eigen::VectorXd*> acol(n);
    for (int i = 0; i < n; ++i) acol[i] = &t.add_column("alpha_abs_" + std::to_string(i));
    auto& energy = t.add_column("energy");
    auto& margin = t.add_column("stability_margin");
    auto& resid = t.add_column("residual_norm");
    auto& stable = t.add_column("stable");
    auto& bswitch = t.add_column("branch_switch");

    Eigen::VectorXd prev, prev2;
    for (Eigen::Index r = 0; r < g_grid.size(); ++r) {
        const ModelSpec spec = with_homogeneous_coupling(tpl, g_grid[r]);
        std::vector<Eigen::VectorXd> seeds;
        if (prev.size() == n && prev.norm() > 0.0) seeds.push_back(prev);
        try {
            for (auto& s : asymptotic_seed(spec)) seeds.push_back(s);
        } catch (const ConfigError&) {
            // no asymptotic seed available at this point; box seeds cover it
        }
        auto sols = solve_displacements(spec, seeds, opt.solve);
        const DisplacementSolution* best = nullptr;
        for (const auto& s : sols)
            if (s.stable) { best = &s; break; }
        stable[r] = best ? 1.0 : 0.0;
        if (!best) { prev2 = prev; prev.resize(0); continue; }
        for (int i = 0; i < n; ++i) (*acol[i])[r] = std::abs(best->alphas[i]);
        energy[r] = best->energy;
        margin[r] = best->stability_margin;
        resid[r] = best->residual_norm;
        bswitch[r] = 0.0;
        if (prev.size() == n && prev2.size() == n) {
            const double trend = std::max((prev - prev2).norm(), 1e-12);
            if ((best->alphas - prev).norm() > opt.jump_factor * trend) bswitch[r] = 1.0;
        }
        prev2 = prev;
        prev = best->alphas;
    }
    t.metadata = {{"operation", "sweep_displacements"},
                  {"spec", spec_to_json(tpl)},
                  {"axis", "g"},
                  {"solver", detail::solve_options_json(opt.solve)},
                  {"jump_factor", opt.jump_factor}};
    t.check();
    return t;
}

struct LambdaScanOptions {
    SolveOptions solve;
    double ed_max_N{8.0};      // exact-diagonalization cross-check up to here
    int ed_cutoff_cap{120};
    int rabi_mode2_cutoff{6};  // that mode's frequency grows with N
    EigensolveOptions eig;
};

// Rescaled order parameter alpha^2/N of the scaled families across the
// normal/superradiant transition, with a Bogoliubov gap and a desk-scale
// exact-diagonalization cross-check column.
inline SweepTable lambda_scan(const ScaledFamily& family, const std::vector<double>& N_list,
                              const Eigen::VectorXd& lambda_grid,
                              const LambdaScanOptions& opt = {}) {
    if (family.family == Family::two_atom_dicke)
        throw ConfigError("lambda_scan: dicke_type or rabi_type only");
    detail::require_ascending(lambda_grid, "lambda_scan");
    if (N_list.empty()) throw ConfigError("lambda_scan: empty N list");
    for (double N : N_list)
        if (!(N > 0.0)) throw ConfigError("lambda_scan: N must be positive");

    const Eigen::Index L = lambda_grid.size();
    SweepTable t;
    t.axis_name = "lambda";
    t.grid.resize(L * Eigen::Index(N_list.size()));
    for (std::size_t b = 0; b < N_list.size(); ++b)
        t.grid.segment(Eigen::Index(b) * L, L) = lambda_grid;
    auto& colN = t.add_column("N");
    auto& op = t.add_column("alpha2_over_N");
    auto& ratio = t.add_column("beta_over_alpha_sqrtN");
    auto& gap = t.add_column("gap");
    auto& ed = t.add_column("ed_nph_over_N");

    Eigen::Index r = 0;
    for (double N : N_list) {
        Eigen::VectorXd prev;
        for (Eigen::Index li = 0; li < L; ++li, ++r) {
            ScaledFamily f = family;
            f.N = N;
            f.control = lambda_grid[li];
            const ModelSpec spec = instantiate(f);
            colN[r] = N;

            std::vector<Eigen::VectorXd> seeds;
            if (prev.size() == spec.n_modes()) seeds.push_back(prev);
            if (f.control > 1.0) {
                // mean-field superradiant guess: alpha_i^2 ~ N w_i (l^2-1)/(2 e_i),
                // alternating signs against the positive coupling
                Eigen::VectorXd s(spec.n_modes());
                for (int i = 0; i < spec.n_modes(); ++i) {
                    const auto& m = spec.modes[i];
                    const double a2 = (m.epsilon > 0.0)
                                          ? N * family.omega1 * (f.control * f.control - 1.0) /
                                                (2.0 * m.epsilon * N)
                                          : 0.0;
                    s[i] = (i % 2 ? -1.0 : 1.0) * std::sqrt(std::max(a2, 0.0));
                }
                // refine the second site from its own stationarity: w b + 2 g a = 0
                if (spec.n_modes() == 2) {
                    const double g = spec.mode_mode.count({1, 0}) ? spec.mode_mode.at({1, 0}) : 0.0;
                    if (spec.modes[1].omega > 0.0)
                        s[1] = -2.0 * g * s[0] / spec.modes[1].omega;
                }
                seeds.push_back(s);
            }
            auto sols = solve_displacements(spec, seeds, opt.solve);
            const DisplacementSolution* best = nullptr;
            for (const auto& s : sols)
                if (s.stable) { best = &s; break; }
            if (!best) continue;
            prev = best->alphas;
            op[r] = best->alphas[0] * best->alphas[0] / N;
            if (std::abs(best->alphas[0]) > 0.0)
                ratio[r] = std::sqrt(N) * best->alphas[1] / best->alphas[0];
            const auto qe = quadratic_expansion(spec, best->alphas);
            gap[r] = diagonalize(qe.form).frequencies.minCoeff();

            if (N <= opt.ed_max_N) {
                std::vector<int> cut(spec.n_modes());
                for (int i = 0; i < spec.n_modes(); ++i) {
                    const double a2 = best->alphas[i] * best->alphas[i];
                    cut[i] = std::min<int>(opt.ed_cutoff_cap,
                                           std::max<int>(16, int(std::ceil(
                                               a2 + 8.0 * std::sqrt(a2 + 1.0) + 12.0))));
                }
                if (family.family == Family::rabi_type && spec.n_modes() == 2)
                    cut[1] = opt.rabi_mode2_cutoff;
                auto basis = build_basis(cut, spec.n_spins());
                auto H = build_hamiltonian(spec, basis, Eigen::VectorXd::Zero(spec.n_modes()));
                auto rep = spectrum(H, 1, opt.eig);
                ed[r] = order_parameter(rep.eigenvectors.col(0),
                                        ladder_op(basis, 0, Ladder::number)) / N;
            }
        }
    }
    t.metadata = {{"operation", "lambda_scan"},
                  {"family", family_to_json(family)},
                  {"N_list", N_list},
                  {"solver", detail::solve_options_json(opt.solve)},
                  {"ed_max_N", opt.ed_max_N},
                  {"rabi_mode2_cutoff", opt.rabi_mode2_cutoff}};
    t.check();
    return t;
}

struct CrossingOptions {
    EigensolveOptions eig;
    double bisect_tol{1e-12};  // analytic bisection width
    double ed_bisect_tol{1e-6};
};

struct CrossingResult {
    SweepTable table;
    double analytic_crossing{0.0};  // root of E_par(chi) - E_orth(chi)
    double ed_crossing{0.0};        // photon-number jump location at finite N
    double ed_jump{0.0};            // photon-number jump magnitude at the crossing
};

// First-order level crossing of the two-atom extended Dicke model: analytic
// block energies vs. exact diagonalization at finite N and small omega_q.
inline CrossingResult first_order_crossing(const ScaledFamily& family,
                                           const Eigen::VectorXd& chi_grid,
                                           const CrossingOptions& opt = {}) {
    if (family.family != Family::two_atom_dicke)
        throw ConfigError("first_order_crossing: two_atom_dicke only");
    detail::require_ascending(chi_grid, "first_order_crossing");
    if (!(family.omega > 0.0)) throw ConfigError("first_order_crossing: omega must be > 0");
    const double N = family.N;
    const double g = family.g, w = family.omega;
    const double wq = (family.omega_q != 0.0) ? family.omega_q : 0.05 * w;

    // block ground energies per unit spin pair (parallel sector displaced,
    // orthogonal sector dark)
    auto e_par = [&](double chi) { return (-4.0 * g * g / w + chi) * N; };
    auto e_orth = [&](double chi) { return -chi * N; };
    auto diff = [&](double chi) { return e_par(chi) - e_orth(chi); };
    double lo = chi_grid[0], hi = chi_grid[chi_grid.size() - 1];
    if (diff(lo) * diff(hi) > 0.0)
        throw ConfigError("first_order_crossing: grid does not straddle the crossing");
    while (hi - lo > opt.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (diff(lo) * diff(mid) <= 0.0) hi = mid; else lo = mid;
    }

    CrossingResult res;
    res.analytic_crossing = 0.5 * (lo + hi);

    const double nph_sr = 4.0 * N * (g / w) * (g / w);  // superradiant photon count
    const int cutoff = std::max<int>(24, int(std::ceil(nph_sr + 8.0 * std::sqrt(nph_sr + 1.0) + 12.0)));
    auto basis = build_basis({cutoff}, 2);
    auto ed_point = [&](double chi) {
        ScaledFamily f = family;
        f.control = chi;
        f.omega_q = wq;
        auto H = build_hamiltonian(instantiate(f), basis, Eigen::VectorXd::Zero(1));
        auto rep = spectrum(H, 1, opt.eig);
        const double nph = order_parameter(rep.eigenvectors.col(0),
                                           ladder_op(basis, 0, Ladder::number));
        return std::make_pair(rep.eigenvalues[0], nph);
    };

    SweepTable t;
    t.axis_name = "chi";
    t.grid = chi_grid;
    auto& cpar = t.add_column("E_par");
    auto& corth = t.add_column("E_orth");
    auto& ced = t.add_column("ed_energy");
    auto& cnph = t.add_column("ed_nph");
    for (Eigen::Index r = 0; r < chi_grid.size(); ++r) {
        cpar[r] = e_par(chi_grid[r]);
        corth[r] = e_orth(chi_grid[r]);
        auto [e, n] = ed_point(chi_grid[r]);
        ced[r] = e;
        cnph[r] = n;
    }

    // locate the photon-number jump by bisection against the half-height
    const double half = 0.5 * nph_sr;
    lo = chi_grid[0];
    hi = chi_grid[chi_grid.size() - 1];
    auto above = [&](double chi) { return ed_point(chi).second > half; };
    const bool alo = above(lo), ahi = above(hi);
    if (alo == ahi)
        throw ConfigError("first_order_crossing: photon jump not inside the grid");
    while (hi - lo > opt.ed_bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (above(mid) == alo) lo = mid; else hi = mid;
    }
    res.ed_crossing = 0.5 * (lo + hi);
    const double dchi = std::max(10.0 * opt.ed_bisect_tol, 1e-4 * (chi_grid[chi_grid.size() - 1] - chi_grid[0]));
    res.ed_jump = std::abs(ed_point(res.ed_crossing + dchi).second -
                           ed_point(res.ed_crossing - dchi).second);

    t.metadata = {{"operation", "first_order_crossing"},
                  {"family", family_to_json(family)},
                  {"omega_q_used", wq},
                  {"cutoff", cutoff},
                  {"analytic_crossing", res.analytic_crossing},
                  {"ed_crossing", res.ed_crossing},
                  {"ed_jump", res.ed_jump}};
    t.check();
    res.table = std::move(t);
    return res;
}

enum class FramePolicy { auto_displaced, lab };

struct SplittingOptions {
    int k{4};
    int cutoff_start{12};
    int levels{3};
    int well_cutoff{32};
    double tol_abs{1e-8};
    double tol_rel{1e-6};
    double truncation_tol{1e-6};
    SolveOptions solve;
    EigensolveOptions eig;
};

// Lowest-doublet splitting and parity content along a coupling grid.  With
// auto_displaced, deep-well points are handled in the displaced frame; lab
// policy (and any point without a stable nonzero branch) uses a truncation
// ladder in the undisplaced basis.
inline SweepTable splitting_curve(const ModelSpec& tpl, const Eigen::VectorXd& g_grid,
                                  FramePolicy policy, const SplittingOptions& opt = {}) {
    detail::require_ascending(g_grid, "splitting_curve");
    tpl.validate();

    SweepTable t;
    t.axis_name = "g";
    t.grid = g_grid;
    auto& split = t.add_column("splitting");
    auto& plo = t.add_column("parity_lo");
    auto& phi = t.add_column("parity_hi");
    auto& doub = t.add_column("doublet");
    auto& conv = t.add_column("converged");
    auto& fnorm = t.add_column("frame_norm");

    Eigen::VectorXd prev_frame;
    for (Eigen::Index r = 0; r < g_grid.size(); ++r) {
        const ModelSpec spec = with_homogeneous_coupling(tpl, g_grid[r]);
        doub[r] = 0.0;
        conv[r] = 0.0;
        fnorm[r] = 0.0;

        if (policy == FramePolicy::auto_displaced && spec.n_spins() == 0) {
            std::vector<Eigen::VectorXd> seeds;
            if (prev_frame.size() == spec.n_modes()) seeds.push_back(prev_frame);
            try {
                for (auto& s : asymptotic_seed(spec)) seeds.push_back(s);
            } catch (const ConfigError&) {
            }
            auto sols = solve_displacements(spec, seeds, opt.solve);
            const DisplacementSolution* best = nullptr;
            for (const auto& s : sols)
                if (s.stable && s.alphas.norm() > 1e-6) { best = &s; break; }
            if (best) {
                prev_frame = best->alphas;
                try {
                    auto rep =
                        two_well_spectrum(spec, best->alphas, opt.k, opt.well_cutoff, opt.eig);
                    split[r] = rep.doubled_eigenvalues[1] - rep.doubled_eigenvalues[0];
                    plo[r] = rep.parity_diag[0][0];
                    phi[r] = rep.parity_diag[0][1];
                    doub[r] = 1.0;
                    conv[r] = (rep.truncation_error < opt.truncation_tol) ? 1.0 : 0.0;
                    fnorm[r] = best->alphas.norm();
                    continue;
                } catch (const ConfigError&) {
                    // shallow wells: the displaced picture does not separate
                    // them yet, fall through to the lab ladder
                }
            }
        }

        // lab-frame truncation ladder
        const Eigen::VectorXd frame = Eigen::VectorXd::Zero(spec.n_modes());
        Eigen::VectorXd prev_evals;
        SpectrumReport rep;
        std::shared_ptr<const FockBasis> basis;
        const int levels = (spec.n_modes() == 0) ? 1 : opt.levels;
        bool ok = true;
        for (int level = 0; level < levels; ++level) {
            try {
                basis = build_basis(
                    std::vector<int>(spec.n_modes(), opt.cutoff_start << level), spec.n_spins());
                rep = spectrum(build_hamiltonian(spec, basis, frame), opt.k, opt.eig);
            } catch (const DimensionCapError&) {
                ok = false;
                break;
            } catch (const ConvergenceError&) {
                ok = false;
                break;
            }
            if (prev_evals.size() > 0)
                rep.truncation_error = (rep.eigenvalues - prev_evals).cwiseAbs().maxCoeff();
            prev_evals = rep.eigenvalues;
        }
        if (!ok) continue;  // row stays flagged unconverged
        conv[r] = (spec.n_modes() == 0 || rep.truncation_error < opt.truncation_tol) ? 1.0 : 0.0;
        auto clusters = cluster_doublets(rep.eigenvalues, opt.tol_abs, opt.tol_rel);
        split[r] = rep.eigenvalues[1] - rep.eigenvalues[0];
        if (clusters.front().doublet_candidate) {
            doub[r] = 1.0;
            Eigen::MatrixXd V = rep.eigenvectors.leftCols(2);
            auto pv = parity_in_subspace(V, parity_op(basis));
            plo[r] = pv[0];
            phi[r] = pv[1];
        }
    }
    t.metadata = {{"operation", "splitting_curve"},
                  {"spec", spec_to_json(tpl)},
                  {"frame_policy", policy == FramePolicy::auto_displaced ? "auto_displaced" : "lab"},
                  {"k", opt.k},
                  {"cutoff_start", opt.cutoff_start},
                  {"levels", opt.levels},
                  {"well_cutoff", opt.well_cutoff},
                  {"tol_abs", opt.tol_abs},
                  {"tol_rel", opt.tol_rel},
                  {"solver", detail::solve_options_json(opt.solve)}};
    t.check();
    return t;
}

}  // namespace usc
