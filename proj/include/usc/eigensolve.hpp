// eigensolve.hpp — exact diagonalization of sparse Hermitian operators,
// doublet clustering, parity diagnostics in degenerate subspaces, order
// parameters, truncation-convergence ladders and displaced-frame two-well
// analysis.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "usc/errors.hpp"
#include "usc/fock.hpp"
#include "usc/models.hpp"

namespace usc {

struct Cluster {
    std::vector<int> indices;
    double max_internal_splitting{0.0};
    bool doublet_candidate{false};
};

struct SpectrumReport {
    Eigen::VectorXd eigenvalues;      // ascending
    Eigen::MatrixXd eigenvectors;     // matching columns
    std::vector<Cluster> clusters;
    std::vector<Eigen::VectorXd> parity_diag;  // per cluster, when analyzed
    double truncation_error{0.0};
};

struct EigensolveOptions {
    Index dense_threshold{4096};   // dense solver at or below this dimension
    double residual_tol{1e-8};     // per-pair ||Hv - Ev|| <= tol*(1+|E|)
    int max_restarts{48};          // Lanczos locking restarts
};

namespace detail {

// Fix eigenvector phase: largest-magnitude component made positive.
inline void fix_phase(Eigen::Ref<Eigen::MatrixXd> V) {
    for (int c = 0; c < V.cols(); ++c) {
        int imax = 0;
        V.col(c).cwiseAbs().maxCoeff(&imax);
        if (V(imax, c) < 0.0) V.col(c) = -V.col(c);
    }
}

inline double lcg(std::uint64_t& state) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    return (double((state >> 11) & ((1ULL << 53) - 1)) / double(1ULL << 53)) - 0.5;
}

// Lanczos with full reorthogonalization and locking restarts; finds the k
// lowest eigenpairs of a sparse symmetric matrix, including multiplicities
// (each restart is orthogonal to everything already locked).
inline void lanczos_lowest(const SparseMat& M, int k, const EigensolveOptions& opt,
                           Eigen::VectorXd& evals, Eigen::MatrixXd& evecs) {
    const Index dim = M.rows();
    Eigen::MatrixXd locked(dim, 0);
    Eigen::VectorXd locked_vals(0);
    std::uint64_t rng = 0x9e3779b97f4a7c15ULL ^ std::uint64_t(dim);
    double worst_residual = 0.0;
    Eigen::VectorXd carry;  // lowest unconverged Ritz vector, restart seed

    for (int restart = 0; restart < opt.max_restarts && locked.cols() < k; ++restart) {
        const int m = std::min<Index>(dim - locked.cols(),
                                      std::max<Index>(140, 2 * k + 60));
        Eigen::MatrixXd V(dim, m);
        Eigen::VectorXd alpha(m), beta(m);
        Eigen::VectorXd v(dim);
        if (carry.size() == dim) {
            v = carry;
        } else {
            for (Index i = 0; i < dim; ++i) v[i] = lcg(rng);
        }
        auto reorth = [&](Eigen::VectorXd& w, int upto) {
            if (locked.cols() > 0)
                w -= locked * (locked.transpose() * w);
            if (upto > 0)
                w -= V.leftCols(upto) * (V.leftCols(upto).transpose() * w);
        };
        reorth(v, 0);
        reorth(v, 0);
        v.normalize();
        int steps = 0;
        for (int j = 0; j < m; ++j) {
            V.col(j) = v;
            Eigen::VectorXd w = M * v;
            alpha[j] = v.dot(w);
            w -= alpha[j] * v;
            if (j > 0) w -= beta[j - 1] * V.col(j - 1);
            reorth(w, j + 1);
            reorth(w, j + 1);
            beta[j] = w.norm();
            steps = j + 1;
            if (beta[j] < 1e-13) break;  // invariant subspace exhausted
            v = w / beta[j];
        }
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
        for (int j = 0; j < steps; ++j) {
            T(j, j) = alpha[j];
            if (j + 1 < steps) T(j, j + 1) = T(j + 1, j) = beta[j];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        carry.resize(0);
        for (int r = 0; r < steps && locked.cols() < k; ++r) {
            const double theta = es.eigenvalues()[r];
            Eigen::VectorXd y = V.leftCols(steps) * es.eigenvectors().col(r);
            y.normalize();
            const double res = (M * y - theta * y).norm();
            worst_residual = std::max(worst_residual, res);
            if (res <= opt.residual_tol * (1.0 + std::abs(theta))) {
                locked.conservativeResize(Eigen::NoChange, locked.cols() + 1);
                locked.col(locked.cols() - 1) = y;
                locked_vals.conservativeResize(locked_vals.size() + 1);
                locked_vals[locked_vals.size() - 1] = theta;
            } else {
                carry = y;  // refine this pair on the next restart
                break;      // higher Ritz values are even less converged
            }
        }
    }
    if (locked.cols() < k)
        throw ConvergenceError("lanczos_lowest: only " +
                                   std::to_string(locked.cols()) + " of " +
                                   std::to_string(k) + " pairs converged",
                               worst_residual);
    // sort ascending
    std::vector<int> order(locked.cols());
    for (int i = 0; i < locked.cols(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return locked_vals[a] < locked_vals[b]; });
    evals.resize(k);
    evecs.resize(dim, k);
    for (int i = 0; i < k; ++i) {
        evals[i] = locked_vals[order[i]];
        evecs.col(i) = locked.col(order[i]);
    }
}

}  // namespace detail

// k lowest eigenpairs, dense below the threshold, Lanczos above, with a
// per-pair residual contract either way.
inline SpectrumReport spectrum(const OperatorMatrix& H, int k,
                               const EigensolveOptions& opt = {}) {
    if (!H.hermitian)
        throw ShapeError("spectrum: operator must be hermitian-flagged");
    const Index dim = H.dim();
    if (k < 1 || Index(k) > dim)
        throw ShapeError("spectrum: need 1 <= k <= dimension");
    SpectrumReport rep;
    if (dim <= opt.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H.dense());
        rep.eigenvalues = es.eigenvalues().head(k);
        rep.eigenvectors = es.eigenvectors().leftCols(k);
    } else {
        detail::lanczos_lowest(H.mat, k, opt, rep.eigenvalues, rep.eigenvectors);
    }
    detail::fix_phase(rep.eigenvectors);
    for (int i = 0; i < k; ++i) {
        const double res =
            (H.mat * rep.eigenvectors.col(i) - rep.eigenvalues[i] * rep.eigenvectors.col(i))
                .norm();
        if (res > opt.residual_tol * (1.0 + std::abs(rep.eigenvalues[i])))
            throw ConvergenceError("spectrum: eigenpair residual " + std::to_string(res),
                                   res);
    }
    return rep;
}

// Maximal runs of consecutive eigenvalues with gap < tol_abs + tol_rel*spread.
inline std::vector<Cluster> cluster_doublets(const Eigen::VectorXd& eigenvalues,
                                             double tol_abs, double tol_rel) {
    if (tol_abs <= 0.0 || tol_rel <= 0.0)
        throw ShapeError("cluster_doublets: tolerances must be > 0");
    std::vector<Cluster> clusters;
    const int n = static_cast<int>(eigenvalues.size());
    if (n == 0) return clusters;
    const double spread = eigenvalues[n - 1] - eigenvalues[0];
    const double tol = tol_abs + tol_rel * spread;
    Cluster cur;
    cur.indices.push_back(0);
    for (int i = 1; i < n; ++i) {
        if (eigenvalues[i] - eigenvalues[i - 1] < tol) {
            cur.indices.push_back(i);
        } else {
            clusters.push_back(cur);
            cur = Cluster{};
            cur.indices.push_back(i);
        }
    }
    clusters.push_back(cur);
    for (auto& c : clusters) {
        c.max_internal_splitting =
            eigenvalues[c.indices.back()] - eigenvalues[c.indices.front()];
        c.doublet_candidate = (c.indices.size() == 2);
    }
    return clusters;
}

// Eigenvalues of V^T P V for an orthonormal set V; {+1, -1} signals a
// parity-breaking doublet, anything else an accidental degeneracy.
inline Eigen::VectorXd parity_in_subspace(const Eigen::MatrixXd& V,
                                          const OperatorMatrix& P) {
    if (V.rows() != P.dim())
        throw ShapeError("parity_in_subspace: dimension mismatch");
    const Eigen::MatrixXd gram = V.transpose() * V;
    const double defect =
        (gram - Eigen::MatrixXd::Identity(V.cols(), V.cols())).cwiseAbs().maxCoeff();
    if (defect > 1e-8)
        throw ShapeError("parity_in_subspace: input not orthonormal (defect " +
                         std::to_string(defect) + ")");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        Eigen::MatrixXd(V.transpose() * (P.mat * V)));
    return es.eigenvalues();
}

inline double order_parameter(const Eigen::VectorXd& state, const OperatorMatrix& op) {
    if (state.size() != op.dim())
        throw ShapeError("order_parameter: dimension mismatch");
    if (std::abs(state.norm() - 1.0) > 1e-8)
        throw ShapeError("order_parameter: state must be normalized");
    return state.dot(op.mat * state);
}

// Diagonalize at cutoffs c, 2c, 4c, ... (same cutoff on every mode);
// truncation_error is the largest shift of the k tracked eigenvalues over
// the final doubling.  Reported at the largest cutoff.
inline SpectrumReport convergence_ladder(const ModelSpec& spec,
                                         const Eigen::VectorXd& frame, int k,
                                         int cutoff_start, int levels,
                                         const EigensolveOptions& opt = {},
                                         Index basis_cap = kSparseDimensionCap) {
    if (levels < 2) throw ShapeError("convergence_ladder: levels must be >= 2");
    SpectrumReport last;
    Eigen::VectorXd prev_evals;
    int completed = 0;
    for (int level = 0; level < levels; ++level) {
        const int c = cutoff_start << level;
        std::shared_ptr<const FockBasis> basis;
        try {
            basis = build_basis(std::vector<int>(spec.n_modes(), c), spec.n_spins(),
                                basis_cap);
        } catch (const DimensionCapError&) {
            if (completed < 2) throw;
            break;
        }
        auto H = build_hamiltonian(spec, basis, frame);
        SpectrumReport rep = spectrum(H, k, opt);
        if (completed > 0)
            rep.truncation_error =
                (rep.eigenvalues - prev_evals).cwiseAbs().maxCoeff();
        prev_evals = rep.eigenvalues;
        last = std::move(rep);
        ++completed;
    }
    return last;
}

// ----- displaced-frame (two-well) machinery -----------------------------

// Truncated displacement operator D[alpha] as a rows x cols matrix:
// column 0 is the coherent state |alpha>, higher columns follow
// D a†|n-1> = (a† - alpha) D|n-1>.
inline Eigen::MatrixXd displacement_matrix(int rows, int cols, double alpha) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(rows, cols);
    const double la = std::log(std::abs(alpha) + (alpha == 0.0 ? 1.0 : 0.0));
    double lfact = 0.0;
    for (int m = 0; m < rows; ++m) {
        if (m > 0) lfact += std::log(double(m));
        if (alpha == 0.0) {
            D(m, 0) = (m == 0) ? 1.0 : 0.0;
        } else {
            const double mag = std::exp(-0.5 * alpha * alpha + m * la - 0.5 * lfact);
            D(m, 0) = (alpha < 0.0 && (m % 2)) ? -mag : mag;
        }
    }
    for (int n = 1; n < cols; ++n) {
        for (int m = rows - 1; m >= 0; --m) {
            double w = -alpha * D(m, n - 1);
            if (m > 0) w += std::sqrt(double(m)) * D(m - 1, n - 1);
            D(m, n) = w / std::sqrt(double(n));
        }
    }
    return D;
}

// Map a displaced-frame state into the undisplaced (lab) Fock basis by
// applying D[alpha_i] mode by mode.  Bosonic bases only.
inline Eigen::VectorXd embed_displaced(const Eigen::VectorXd& state,
                                       const FockBasis& from,
                                       const FockBasis& to,
                                       const Eigen::VectorXd& alphas) {
    if (from.n_spins != 0 || to.n_spins != 0)
        throw ShapeError("embed_displaced: bosonic bases only");
    if (from.n_modes() != to.n_modes() || alphas.size() != from.n_modes())
        throw ShapeError("embed_displaced: mode-count mismatch");
    Eigen::VectorXd cur = state;
    std::vector<int> dims = from.mode_cutoffs;
    for (int m = 0; m < from.n_modes(); ++m) {
        const int in_c = dims[m];
        const int out_c = to.mode_cutoffs[m];
        const Eigen::MatrixXd D = displacement_matrix(out_c, in_c, alphas[m]);
        Index inner = 1, outer = 1;
        for (int j = 0; j < m; ++j) inner *= dims[j];
        for (int j = m + 1; j < from.n_modes(); ++j) outer *= dims[j];
        Eigen::VectorXd next(inner * out_c * outer);
        for (Index o = 0; o < outer; ++o)
            for (int r = 0; r < out_c; ++r)
                for (Index i = 0; i < inner; ++i) {
                    double acc = 0.0;
                    for (int s = 0; s < in_c; ++s)
                        acc += D(r, s) * cur[i + inner * (s + Index(in_c) * o)];
                    next[i + inner * (r + Index(out_c) * o)] = acc;
                }
        cur = std::move(next);
        dims[m] = out_c;
    }
    return cur;
}

// Low-energy analysis of a deep symmetric double well around the stationary
// pair +-alpha.  The displaced-frame Hamiltonians at +alpha and -alpha are
// exactly similar through the mode parity (checked entrywise), so the
// spectrum is the single-well spectrum doubled; the parity content of each
// doublet is measured honestly by embedding the well eigenvectors into the
// lab Fock basis.
struct TwoWellReport {
    Eigen::VectorXd doubled_eigenvalues;   // each well level twice
    std::vector<Cluster> clusters;         // pairs
    std::vector<Eigen::VectorXd> parity_diag;  // per doublet, from lab embedding
    double frame_identity_defect{0.0};     // max |P H(-a) P - H(+a)|
    double embedding_norm_defect{0.0};     // worst |1 - ||embedded|||
    double cross_well_overlap{0.0};        // worst |<u|P|u>|
    double truncation_error{0.0};
};

inline TwoWellReport two_well_spectrum(const ModelSpec& spec,
                                       const Eigen::VectorXd& alphas, int k,
                                       int cutoff, const EigensolveOptions& opt = {}) {
    if (spec.n_spins() != 0)
        throw ShapeError("two_well_spectrum: bosonic specs only");
    const int n = spec.n_modes();
    const int k_well = (k + 1) / 2;
    auto basis = build_basis(std::vector<int>(n, cutoff), 0);
    auto Hp = build_hamiltonian(spec, basis, alphas);
    auto Hm = build_hamiltonian(spec, basis, Eigen::VectorXd(-alphas));
    const auto P_disp = parity_op(basis);

    TwoWellReport rep;
    rep.frame_identity_defect =
        max_abs(SparseMat(P_disp.mat * Hm.mat * P_disp.mat - Hp.mat));

    // convergence ladder in the well frame
    SpectrumReport lower = spectrum(build_hamiltonian(
        spec, build_basis(std::vector<int>(n, cutoff / 2), 0), alphas), k_well, opt);
    SpectrumReport well = spectrum(Hp, k_well, opt);
    rep.truncation_error =
        (well.eigenvalues - lower.eigenvalues).cwiseAbs().maxCoeff();

    rep.doubled_eigenvalues.resize(2 * k_well);
    for (int i = 0; i < k_well; ++i)
        rep.doubled_eigenvalues[2 * i] = rep.doubled_eigenvalues[2 * i + 1] =
            well.eigenvalues[i];
    rep.doubled_eigenvalues.conservativeResize(k);
    for (int i = 0; i + 1 < k; i += 2) {
        Cluster c;
        c.indices = {i, i + 1};
        c.doublet_candidate = true;
        rep.clusters.push_back(c);
    }

    // lab-frame embedding for parity diagnostics
    std::vector<int> lab_cutoffs(n);
    for (int i = 0; i < n; ++i) {
        const double a = std::abs(alphas[i]);
        lab_cutoffs[i] = static_cast<int>(std::ceil(a * a + 8.0 * a + cutoff + 16));
    }
    auto lab_basis = build_basis(lab_cutoffs, 0);
    const auto P_lab = parity_op(lab_basis);
    for (int i = 0; i < k_well && 2 * i < k; ++i) {
        Eigen::VectorXd u =
            embed_displaced(well.eigenvectors.col(i), *basis, *lab_basis, alphas);
        rep.embedding_norm_defect =
            std::max(rep.embedding_norm_defect, std::abs(1.0 - u.norm()));
        u.normalize();
        Eigen::VectorXd pu = P_lab.mat * u;
        const double s = u.dot(pu);
        rep.cross_well_overlap = std::max(rep.cross_well_overlap, std::abs(s));
        if (std::abs(s) > 0.01)
            throw ConfigError(
                "two_well_spectrum: wells not resolved (cross-well overlap " +
                std::to_string(std::abs(s)) + "); the truncated well basis still reaches "
                "the mirror well, use lab-frame diagonalization instead");
        // orthonormal span of {u, Pu}: symmetric and antisymmetric combos
        Eigen::MatrixXd V(u.size(), 2);
        V.col(0) = (u + pu).normalized();
        V.col(1) = (u - pu).normalized();
        rep.parity_diag.push_back(parity_in_subspace(V, P_lab));
    }
    return rep;
}

}  // namespace usc
