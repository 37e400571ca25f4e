// bogoliubov.hpp — normal-mode decomposition of real multimode quadratic
// boson Hamiltonians
//   H = sum_ij A_ij a†_i a_j + 1/2 sum_ij B_ij (a†_i a†_j + a_i a_j) + E0.
//
// In quadratures H = 1/2 x†(A+B)x + 1/2 p†(A-B)p - tr(A)/2 + E0, so the
// squared normal frequencies are the eigenvalues of (A-B)(A+B), computed
// here through the symmetric congruence (A-B)^{1/2}(A+B)(A-B)^{1/2}.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>
#include <vector>

#include "usc/errors.hpp"
#include "usc/models.hpp"

namespace usc {

// Squared-frequency tolerance: margins below this are treated as unstable.
inline constexpr double kZeroFrequencyTol = 1e-10;

struct StabilityReport {
    bool stable{false};
    double margin{0.0};        // smallest squared normal frequency
    bool zero_mode_warning{false};  // |margin| within tolerance of zero
};

namespace detail {

inline Eigen::MatrixXd sym_sqrt(const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& es,
                                double exponent) {
    return es.eigenvectors() *
           es.eigenvalues().array().pow(exponent).matrix().asDiagonal() *
           es.eigenvectors().transpose();
}

}  // namespace detail

inline StabilityReport stability(const QuadraticForm& q) {
    if (q.A.rows() != q.A.cols() || q.B.rows() != q.B.cols() || q.A.rows() != q.B.rows())
        throw ShapeError("stability: A and B must be square and of equal size");
    const Eigen::MatrixXd Ms = q.A - q.B;  // momentum block
    const Eigen::MatrixXd Mp = q.A + q.B;  // position block
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_s(Ms), es_p(Mp);
    StabilityReport rep;
    const double min_s = es_s.eigenvalues().minCoeff();
    const double min_p = es_p.eigenvalues().minCoeff();
    if (min_s > 0.0 || min_p > 0.0) {
        // congruence with whichever block is positive definite
        const auto& pd = (min_s > 0.0) ? es_s : es_p;
        const Eigen::MatrixXd& other = (min_s > 0.0) ? Mp : Ms;
        const Eigen::MatrixXd root = detail::sym_sqrt(pd, 0.5);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(root * other * root);
        rep.margin = es.eigenvalues().minCoeff();
    } else {
        // both quadrature blocks indefinite: certainly unstable
        rep.margin = std::min(min_s, min_p);
    }
    rep.stable = rep.margin > kZeroFrequencyTol;
    rep.zero_mode_warning = std::abs(rep.margin) <= kZeroFrequencyTol;
    return rep;
}

struct BogoliubovResult {
    Eigen::VectorXd frequencies;  // nu_k > 0, ascending
    double ground_energy{0.0};    // E0 + (sum nu - tr A)/2
    Eigen::MatrixXd u, v;         // b_k = sum_i u_ki a_i + v_ki a†_i
};

inline BogoliubovResult diagonalize(const QuadraticForm& q) {
    const StabilityReport rep = stability(q);
    if (!rep.stable)
        throw InstabilityError("diagonalize: unstable quadratic form, "
                               "smallest squared frequency " +
                                   std::to_string(rep.margin),
                               rep.margin);
    const Eigen::MatrixXd Ms = q.A - q.B;
    const Eigen::MatrixXd Mp = q.A + q.B;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_s(Ms);
    if (es_s.eigenvalues().minCoeff() <= 0.0)
        throw InstabilityError("diagonalize: A - B is not positive definite",
                               es_s.eigenvalues().minCoeff());
    const Eigen::MatrixXd root = detail::sym_sqrt(es_s, 0.5);
    const Eigen::MatrixXd root_inv = detail::sym_sqrt(es_s, -0.5);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(root * Mp * root);
    const Eigen::VectorXd nu = es.eigenvalues().array().sqrt();
    const Eigen::MatrixXd Wt = es.eigenvectors().transpose();
    // normal quadratures: x~ = E x, p~ = F p with E F^T = 1
    const Eigen::MatrixXd E =
        nu.array().sqrt().matrix().asDiagonal() * Wt * root_inv;
    const Eigen::MatrixXd F =
        nu.array().rsqrt().matrix().asDiagonal() * Wt * root;
    BogoliubovResult res;
    res.frequencies = nu;
    res.u = 0.5 * (E + F);
    res.v = 0.5 * (E - F);
    res.ground_energy = q.E0 + 0.5 * (nu.sum() - q.A.trace());
    return res;
}

// Rebuild (A, B, E0) from a transformation; inverse of diagonalize up to
// round-off, used as a self-check.
inline QuadraticForm reconstruct(const BogoliubovResult& r) {
    const Eigen::MatrixXd nu = r.frequencies.asDiagonal();
    QuadraticForm q;
    q.A = r.u.transpose() * nu * r.u + r.v.transpose() * nu * r.v;
    q.B = r.u.transpose() * nu * r.v + r.v.transpose() * nu * r.u;
    q.E0 = r.ground_energy - 0.5 * (r.frequencies.sum() - q.A.trace());
    return q;
}

// The `levels` lowest energies of the free quasi-particle spectrum
// E = ground_energy + sum_k n_k nu_k, duplicates retained.
inline std::vector<double> excitation_spectrum(const BogoliubovResult& r, int levels) {
    if (levels < 1) throw ShapeError("excitation_spectrum: levels must be >= 1");
    const int n = static_cast<int>(r.frequencies.size());
    using State = std::pair<double, std::vector<int>>;
    auto cmp = [](const State& a, const State& b) { return a.first > b.first; };
    std::priority_queue<State, std::vector<State>, decltype(cmp)> heap(cmp);
    heap.push({0.0, std::vector<int>(n, 0)});
    std::vector<double> out;
    while (!heap.empty() && static_cast<int>(out.size()) < levels) {
        auto [e, occ] = heap.top();
        heap.pop();
        out.push_back(r.ground_energy + e);
        // increment only at or beyond the last populated mode to enumerate
        // each occupation vector exactly once
        int first = 0;
        for (int i = n - 1; i >= 0; --i)
            if (occ[i] > 0) { first = i; break; }
        for (int i = first; i < n; ++i) {
            auto next = occ;
            ++next[i];
            heap.push({e + r.frequencies[i], std::move(next)});
        }
    }
    return out;
}

}  // namespace usc
