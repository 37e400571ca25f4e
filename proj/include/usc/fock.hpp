// fock.hpp — truncated Fock space: basis enumeration, ladder / spin / parity
// operators as sparse matrices.
//
// Basis ordering is little-endian mixed radix: mode 0 is the fastest digit,
// modes are followed by the spin bits (spin 0 first).  A basis index decodes
// as
//   index = n_0 + c_0*(n_1 + c_1*(... )) + (prod_i c_i) * (b_0 + 2*b_1 + ...)
// where n_i < c_i are mode occupations and b_k in {0,1} are spin bits
// (bit 0 means sigma_z = +1).

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cmath>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "usc/errors.hpp"

namespace usc {

using Index = std::int64_t;
using SparseMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct FockBasis {
    std::vector<int> mode_cutoffs;
    int n_spins{0};
    Index dimension{0};
    std::vector<Index> mode_strides;  // stride of each mode digit
    Index spin_stride{0};             // stride of spin bit 0

    int n_modes() const { return static_cast<int>(mode_cutoffs.size()); }

    int occupation(Index index, int mode) const {
        return static_cast<int>((index / mode_strides[mode]) % mode_cutoffs[mode]);
    }
    int spin_bit(Index index, int spin) const {
        return static_cast<int>((index / (spin_stride << spin)) % 2);
    }
    Index index_of(const std::vector<int>& occ, const std::vector<int>& bits) const {
        Index idx = 0;
        for (int m = 0; m < n_modes(); ++m) idx += Index(occ[m]) * mode_strides[m];
        for (int s = 0; s < n_spins; ++s) idx += Index(bits[s]) * (spin_stride << s);
        return idx;
    }
};

// Default dimension caps.  The dense cap guards O(dim^2) storage requests,
// the sparse cap guards basis construction itself.
inline constexpr Index kDenseDimensionCap = 200000;
inline constexpr Index kSparseDimensionCap = 10000000;

inline std::shared_ptr<const FockBasis> build_basis(std::vector<int> mode_cutoffs,
                                                    int n_spins,
                                                    Index cap = kSparseDimensionCap) {
    if (n_spins < 0) throw ShapeError("build_basis: n_spins must be >= 0");
    auto b = std::make_shared<FockBasis>();
    b->mode_cutoffs = std::move(mode_cutoffs);
    b->n_spins = n_spins;
    Index dim = 1;
    b->mode_strides.reserve(b->mode_cutoffs.size());
    for (int c : b->mode_cutoffs) {
        if (c < 2) throw ConfigError("build_basis: each mode cutoff must be >= 2");
        b->mode_strides.push_back(dim);
        if (dim > cap / c)
            throw DimensionCapError("build_basis: mode product " + std::to_string(dim) +
                                    " x " + std::to_string(c) + " exceeds cap " +
                                    std::to_string(cap));
        dim *= c;
    }
    b->spin_stride = dim;
    for (int s = 0; s < n_spins; ++s) {
        if (dim > cap / 2)
            throw DimensionCapError("build_basis: dimension " + std::to_string(dim) +
                                    " x 2 exceeds cap " + std::to_string(cap));
        dim *= 2;
    }
    b->dimension = dim;
    return b;
}

struct OperatorMatrix {
    std::shared_ptr<const FockBasis> basis;
    SparseMat mat;
    bool hermitian{false};

    Index dim() const { return basis ? basis->dimension : 0; }
    Eigen::MatrixXd dense() const {
        if (dim() > kDenseDimensionCap)
            throw DimensionCapError("dense(): dimension exceeds dense cap");
        return Eigen::MatrixXd(mat);
    }
};

namespace detail {
inline void check_same_basis(const OperatorMatrix& a, const OperatorMatrix& b) {
    if (a.basis.get() != b.basis.get())
        throw ShapeError("operator arithmetic requires a shared basis");
}
}  // namespace detail

inline OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
    detail::check_same_basis(a, b);
    return {a.basis, SparseMat(a.mat + b.mat), a.hermitian && b.hermitian};
}
inline OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
    detail::check_same_basis(a, b);
    return {a.basis, SparseMat(a.mat - b.mat), a.hermitian && b.hermitian};
}
inline OperatorMatrix operator*(double s, const OperatorMatrix& a) {
    return {a.basis, SparseMat(s * a.mat), a.hermitian};
}
inline OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
    detail::check_same_basis(a, b);
    return {a.basis, SparseMat(a.mat * b.mat), false};
}

inline OperatorMatrix adjoint(const OperatorMatrix& a) {
    return {a.basis, SparseMat(SparseMat(a.mat.transpose())), a.hermitian};
}

inline OperatorMatrix identity_op(std::shared_ptr<const FockBasis> basis) {
    SparseMat m(basis->dimension, basis->dimension);
    m.setIdentity();
    return {std::move(basis), std::move(m), true};
}

enum class Ladder { annihilate, create, number, quadrature };

// Displaced-frame ladder operators by operator substitution a -> a + alpha
// (real alpha).  quadrature returns a + a† + 2 alpha, number returns
// (a† + alpha)(a + alpha) expanded term by term.
inline OperatorMatrix ladder_op(std::shared_ptr<const FockBasis> basis, int site,
                                Ladder kind, double displacement = 0.0) {
    if (site < 0 || site >= basis->n_modes())
        throw ShapeError("ladder_op: mode index out of range");
    if (!std::isfinite(displacement))
        throw ShapeError("ladder_op: displacement must be finite");
    const Index dim = basis->dimension;
    const Index stride = basis->mode_strides[site];
    const int cutoff = basis->mode_cutoffs[site];
    const double alpha = displacement;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(dim) * 2);
    for (Index idx = 0; idx < dim; ++idx) {
        const int n = basis->occupation(idx, site);
        const double lower = (n > 0) ? std::sqrt(double(n)) : 0.0;  // <n-1|a|n>
        switch (kind) {
            case Ladder::annihilate:
                if (n > 0) trip.emplace_back(idx - stride, idx, lower);
                if (alpha != 0.0) trip.emplace_back(idx, idx, alpha);
                break;
            case Ladder::create:
                if (n > 0) trip.emplace_back(idx, idx - stride, lower);
                if (alpha != 0.0) trip.emplace_back(idx, idx, alpha);
                break;
            case Ladder::number:
                // (a†+α)(a+α) = a†a + α a + α a† + α²
                if (n > 0 && alpha != 0.0) {
                    trip.emplace_back(idx - stride, idx, alpha * lower);
                    trip.emplace_back(idx, idx - stride, alpha * lower);
                }
                trip.emplace_back(idx, idx, double(n) + alpha * alpha);
                break;
            case Ladder::quadrature:
                if (n > 0) {
                    trip.emplace_back(idx - stride, idx, lower);
                    trip.emplace_back(idx, idx - stride, lower);
                }
                if (alpha != 0.0) trip.emplace_back(idx, idx, 2.0 * alpha);
                break;
        }
        (void)cutoff;
    }
    SparseMat m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    const bool herm = (kind == Ladder::number || kind == Ladder::quadrature);
    return {std::move(basis), std::move(m), herm};
}

enum class Axis { x, z };

inline OperatorMatrix spin_op(std::shared_ptr<const FockBasis> basis, int spin_index,
                              Axis axis) {
    if (spin_index < 0 || spin_index >= basis->n_spins)
        throw ShapeError("spin_op: spin index out of range");
    const Index dim = basis->dimension;
    const Index stride = basis->spin_stride << spin_index;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(dim));
    for (Index idx = 0; idx < dim; ++idx) {
        const int b = basis->spin_bit(idx, spin_index);
        if (axis == Axis::x) {
            trip.emplace_back(b ? idx - stride : idx + stride, idx, 1.0);
        } else {
            trip.emplace_back(idx, idx, b ? -1.0 : 1.0);
        }
    }
    SparseMat m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return {std::move(basis), std::move(m), true};
}

// Global parity P = prod_modes (-1)^(a†a) * prod_spins sigma_z, diagonal +-1.
inline OperatorMatrix parity_op(std::shared_ptr<const FockBasis> basis) {
    const Index dim = basis->dimension;
    std::vector<Triplet> trip;
    trip.reserve(static_cast<size_t>(dim));
    for (Index idx = 0; idx < dim; ++idx) {
        int total = 0;
        for (int m = 0; m < basis->n_modes(); ++m) total += basis->occupation(idx, m);
        for (int s = 0; s < basis->n_spins; ++s) total += basis->spin_bit(idx, s);
        trip.emplace_back(idx, idx, (total % 2 == 0) ? 1.0 : -1.0);
    }
    SparseMat m(dim, dim);
    m.setFromTriplets(trip.begin(), trip.end());
    m.makeCompressed();
    return {std::move(basis), std::move(m), true};
}

inline double max_abs(const SparseMat& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseMat::InnerIterator it(m, k); it; ++it)
            v = std::max(v, std::abs(it.value()));
    return v;
}

// Entrywise max |M - M†|; used to validate the hermitian flag.
inline double hermiticity_defect(const OperatorMatrix& op) {
    return max_abs(SparseMat(op.mat - SparseMat(op.mat.transpose())));
}

}  // namespace usc
