// displacement.hpp — real stationary points of the classical energy
// landscape of coupled Kerr oscillators: residuals, asymptotic seeds,
// damped-Newton branch solving with sign-pair bookkeeping.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "usc/bogoliubov.hpp"
#include "usc/errors.hpp"
#include "usc/models.hpp"

namespace usc {

// Gradient/2 of classical_energy: component i is
//   w_i a_i + 2 eps_i a_i^3 + sum_{j != i} 2 g_ij a_j.
inline Eigen::VectorXd stationarity_residual(const ModelSpec& spec,
                                             const Eigen::VectorXd& alphas) {
    if (spec.n_spins() != 0)
        throw ShapeError("stationarity_residual: bosonic specs only");
    if (alphas.size() != spec.n_modes())
        throw ShapeError("stationarity_residual: displacement length mismatch");
    Eigen::VectorXd r(spec.n_modes());
    for (int i = 0; i < spec.n_modes(); ++i)
        r[i] = spec.modes[i].omega * alphas[i] +
               2.0 * spec.modes[i].epsilon * alphas[i] * alphas[i] * alphas[i];
    for (const auto& [key, g] : spec.mode_mode) {
        r[key.first] += 2.0 * g * alphas[key.second];
        r[key.second] += 2.0 * g * alphas[key.first];
    }
    return r;
}

// Rounding floor of the residual: the norm of the vector of absolute term
// magnitudes.  A residual below tol * (1 + this) is converged regardless of
// the displacement scale.
inline double residual_scale(const ModelSpec& spec, const Eigen::VectorXd& alphas) {
    Eigen::VectorXd t(spec.n_modes());
    for (int i = 0; i < spec.n_modes(); ++i)
        t[i] = std::abs(spec.modes[i].omega * alphas[i]) +
               std::abs(2.0 * spec.modes[i].epsilon * alphas[i] * alphas[i] * alphas[i]);
    for (const auto& [key, g] : spec.mode_mode) {
        t[key.first] += std::abs(2.0 * g * alphas[key.second]);
        t[key.second] += std::abs(2.0 * g * alphas[key.first]);
    }
    return t.norm();
}

inline Eigen::MatrixXd stationarity_jacobian(const ModelSpec& spec,
                                             const Eigen::VectorXd& alphas) {
    const int n = spec.n_modes();
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        J(i, i) = spec.modes[i].omega +
                  6.0 * spec.modes[i].epsilon * alphas[i] * alphas[i];
    for (const auto& [key, g] : spec.mode_mode) {
        J(key.first, key.second) += 2.0 * g;
        J(key.second, key.first) += 2.0 * g;
    }
    return J;
}

// Positive root of k^(8/3) + k^(2/3) - 2^(1/3) = 0, bracketed in (0, 1).
// Bisection start, Newton polish.
inline double solve_k() {
    auto f = [](double k) {
        return std::pow(k, 8.0 / 3.0) + std::pow(k, 2.0 / 3.0) - std::cbrt(2.0);
    };
    double lo = 1e-12, hi = 1.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) > 0.0 ? hi : lo) = mid;
    }
    double k = 0.5 * (lo + hi);
    for (int it = 0; it < 8; ++it) {
        const double df = (8.0 / 3.0) * std::pow(k, 5.0 / 3.0) +
                          (2.0 / 3.0) * std::pow(k, -1.0 / 3.0);
        k -= f(k) / df;
    }
    return k;
}

// USC-limit seed vectors.  Dimer: alpha^2 = g / (eps1^3 eps2)^(1/4),
// beta = -alpha (eps1/eps2)^(1/4).  Trimer: the symmetric-case pattern
// {k, k, -(k + k^3)} scaled per site by sqrt(g / eps_i); all three
// assignments of the lone-sign site are returned.  The third-component
// prefactor follows direct substitution into the stationarity equations
// (the residual vanishes), not the printed k(k+k^3) form.
inline std::vector<Eigen::VectorXd> asymptotic_seed(const ModelSpec& spec) {
    const int n = spec.n_modes();
    if (n != 2 && n != 3)
        throw ShapeError("asymptotic_seed: 2 or 3 modes supported");
    for (const auto& m : spec.modes)
        if (m.epsilon <= 0.0)
            throw ConfigError("asymptotic_seed: every Kerr coefficient must be > 0 "
                              "(landscape unbounded below at large coupling)");
    double gsum = 0.0;
    int gcount = 0;
    for (const auto& [key, g] : spec.mode_mode) {
        (void)key;
        gsum += std::abs(g);
        ++gcount;
    }
    if (gcount == 0 || gsum == 0.0) return {};
    const double g = gsum / gcount;
    std::vector<Eigen::VectorXd> seeds;
    if (n == 2) {
        const double e1 = spec.modes[0].epsilon, e2 = spec.modes[1].epsilon;
        const double alpha = std::sqrt(g / std::pow(e1 * e1 * e1 * e2, 0.25));
        Eigen::VectorXd s(2);
        s << alpha, -alpha * std::pow(e1 / e2, 0.25);
        seeds.push_back(s);
    } else {
        const double k = solve_k();
        for (int lone = 0; lone < 3; ++lone) {
            Eigen::VectorXd s(3);
            for (int i = 0; i < 3; ++i) {
                const double base = std::sqrt(g / spec.modes[i].epsilon);
                s[i] = (i == lone) ? -(k + k * k * k) * base : k * base;
            }
            seeds.push_back(s);
        }
    }
    return seeds;
}

struct DisplacementSolution {
    Eigen::VectorXd alphas;
    double residual_norm{0.0};
    bool stable{false};
    double stability_margin{0.0};
    double energy{0.0};
    std::string branch_id;  // lexicographically largest sign pattern of the +- pair
};

struct NewtonOptions {
    double tol{1e-10};
    int max_iterations{60};
    int max_backtracks{40};
};

// Damped Newton on the stationarity residual; returns nullopt when the
// Jacobian is singular at an iterate or the iteration stalls.
inline std::optional<Eigen::VectorXd> newton_solve(const ModelSpec& spec,
                                                   Eigen::VectorXd alphas,
                                                   const NewtonOptions& opt = {}) {
    auto converged = [&](double rn) {
        return rn < opt.tol * (1.0 + residual_scale(spec, alphas));
    };
    double rnorm = stationarity_residual(spec, alphas).norm();
    for (int it = 0; it < opt.max_iterations; ++it) {
        if (rnorm < opt.tol) return alphas;
        const Eigen::VectorXd r = stationarity_residual(spec, alphas);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(stationarity_jacobian(spec, alphas));
        if (!lu.isInvertible()) return std::nullopt;
        const Eigen::VectorXd step = lu.solve(-r);
        double t = 1.0;
        int bt = 0;
        while (bt < opt.max_backtracks) {
            const double trial = stationarity_residual(spec, alphas + t * step).norm();
            if (trial < rnorm) {
                alphas += t * step;
                rnorm = trial;
                break;
            }
            t *= 0.5;
            ++bt;
        }
        if (bt == opt.max_backtracks)
            return converged(rnorm) ? std::optional{alphas} : std::nullopt;  // stalled
    }
    if (converged(rnorm)) return alphas;
    return std::nullopt;
}

namespace detail {

// Canonical representative of the +-alpha pair: first component of
// magnitude > threshold is made positive.
inline Eigen::VectorXd canonical_sign(Eigen::VectorXd a, double thresh = 1e-9) {
    for (int i = 0; i < a.size(); ++i) {
        if (std::abs(a[i]) > thresh) {
            if (a[i] < 0.0) a = -a;
            break;
        }
    }
    return a;
}

inline std::string sign_pattern(const Eigen::VectorXd& a, double thresh = 1e-9) {
    std::string s;
    for (int i = 0; i < a.size(); ++i)
        s += (std::abs(a[i]) <= thresh) ? '0' : (a[i] > 0.0 ? '+' : '-');
    return s;
}

// Lexicographically largest of the two sign patterns of the pair.
inline std::string branch_label(const Eigen::VectorXd& a) {
    const std::string p = sign_pattern(a), m = sign_pattern(-a);
    return std::max(p, m);
}

// Deterministic low-discrepancy points (Halton bases 2,3,5) in the box
// |a_i| <= half_width.
inline std::vector<Eigen::VectorXd> box_seeds(int n_modes, int count, double half_width) {
    static constexpr int bases[3] = {2, 3, 5};
    auto halton = [](int index, int base) {
        double f = 1.0, r = 0.0;
        while (index > 0) {
            f /= base;
            r += f * (index % base);
            index /= base;
        }
        return r;
    };
    std::vector<Eigen::VectorXd> out;
    out.reserve(count);
    for (int i = 1; i <= count; ++i) {
        Eigen::VectorXd s(n_modes);
        for (int d = 0; d < n_modes; ++d)
            s[d] = (2.0 * halton(i, bases[d % 3]) - 1.0) * half_width;
        out.push_back(s);
    }
    return out;
}

}  // namespace detail

struct SolveOptions {
    NewtonOptions newton{};
    double dedup_distance{1e-6};
    bool extra_box_seeds{true};
    int threads{1};
};

// Solve from every seed (plus the origin and a deterministic box sweep),
// deduplicate, expand into +- pairs, certify stability through the
// Bogoliubov margin of the quadratic expansion, sort by energy then
// lexicographic displacement.
inline std::vector<DisplacementSolution> solve_displacements(
    const ModelSpec& spec, const std::vector<Eigen::VectorXd>& seeds,
    const SolveOptions& opt = {}) {
    const int n = spec.n_modes();
    std::vector<Eigen::VectorXd> all_seeds = seeds;
    all_seeds.push_back(Eigen::VectorXd::Zero(n));
    if (opt.extra_box_seeds) {
        double max_mag = 1.0;
        for (const auto& s : seeds)
            max_mag = std::max(max_mag, s.cwiseAbs().maxCoeff());
        const int count = (1 << n) * 5;
        auto extra = detail::box_seeds(n, count, 2.0 * max_mag);
        all_seeds.insert(all_seeds.end(), extra.begin(), extra.end());
    }

    std::vector<std::optional<Eigen::VectorXd>> roots(all_seeds.size());
    if (opt.threads > 1) {
        std::vector<std::future<std::optional<Eigen::VectorXd>>> futs;
        futs.reserve(all_seeds.size());
        for (const auto& s : all_seeds)
            futs.push_back(std::async(std::launch::async, [&spec, s, &opt] {
                return newton_solve(spec, s, opt.newton);
            }));
        for (size_t i = 0; i < futs.size(); ++i) roots[i] = futs[i].get();
    } else {
        for (size_t i = 0; i < all_seeds.size(); ++i)
            roots[i] = newton_solve(spec, all_seeds[i], opt.newton);
    }

    std::vector<Eigen::VectorXd> unique;
    for (const auto& r : roots) {
        if (!r) continue;
        const Eigen::VectorXd c = detail::canonical_sign(*r);
        bool dup = false;
        for (const auto& u : unique)
            if ((u - c).norm() < opt.dedup_distance) { dup = true; break; }
        if (!dup) unique.push_back(c);
    }

    std::vector<DisplacementSolution> out;
    for (const auto& c : unique) {
        const auto expansion = quadratic_expansion(spec, c);
        const StabilityReport rep = stability(expansion.form);
        DisplacementSolution base;
        base.residual_norm = stationarity_residual(spec, c).norm();
        base.stable = rep.stable;
        base.stability_margin = rep.margin;
        base.energy = classical_energy(spec, c);
        base.branch_id = detail::branch_label(c);
        base.alphas = c;
        out.push_back(base);
        if (c.cwiseAbs().maxCoeff() > opt.dedup_distance) {
            DisplacementSolution mirror = base;
            mirror.alphas = -c;
            out.push_back(mirror);
        }
    }
    std::sort(out.begin(), out.end(),
              [](const DisplacementSolution& a, const DisplacementSolution& b) {
                  if (a.energy != b.energy) return a.energy < b.energy;
                  return std::lexicographical_compare(
                      a.alphas.data(), a.alphas.data() + a.alphas.size(),
                      b.alphas.data(), b.alphas.data() + b.alphas.size());
              });
    return out;
}

}  // namespace usc
