// models.hpp — declarative Hamiltonian catalog: coupled Kerr oscillators,
// spin sites, scaled families (Dicke-type, Rabi-type, two-atom extended
// Dicke), full sparse assembly and exact quadratic expansion around a real
// displacement.

#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "usc/errors.hpp"
#include "usc/fock.hpp"

namespace usc {

struct Mode {
    double omega{1.0};    // harmonic frequency, > 0
    double epsilon{0.0};  // Kerr coefficient of a†a†aa, >= 0
};

struct Spin {
    double omega_q{0.0};  // sigma_z splitting
};

using PairKey = std::pair<int, int>;  // stored with first > second (modes) or
                                      // first > second (spins); mode-spin keys
                                      // are (mode, spin).

struct ModelSpec {
    std::vector<Mode> modes;
    std::vector<Spin> spins;
    std::map<PairKey, double> mode_mode;  // quadrature-quadrature couplings
    std::map<PairKey, double> mode_spin;  // quadrature x sigma_x couplings
    std::map<PairKey, double> spin_spin;  // sigma_x sigma_x couplings

    int n_modes() const { return static_cast<int>(modes.size()); }
    int n_spins() const { return static_cast<int>(spins.size()); }

    void set_mode_mode(int i, int j, double g) {
        if (i == j) throw ShapeError("ModelSpec: no mode self-couplings");
        mode_mode[{std::max(i, j), std::min(i, j)}] = g;
    }
    void set_spin_spin(int k, int l, double chi) {
        if (k == l) throw ShapeError("ModelSpec: no spin self-couplings");
        spin_spin[{std::max(k, l), std::min(k, l)}] = chi;
    }
    void set_mode_spin(int mode, int spin, double g) { mode_spin[{mode, spin}] = g; }

    void validate() const {
        for (const auto& m : modes)
            if (!(m.omega > 0.0)) throw ConfigError("ModelSpec: omega must be > 0");
        for (const auto& m : modes)
            if (m.epsilon < 0.0) throw ConfigError("ModelSpec: epsilon must be >= 0");
        auto in_range = [](int i, int n) { return i >= 0 && i < n; };
        for (const auto& [k, g] : mode_mode) {
            (void)g;
            if (!in_range(k.first, n_modes()) || !in_range(k.second, n_modes()) ||
                k.first == k.second)
                throw ConfigError("ModelSpec: bad mode-mode coupling indices");
        }
        for (const auto& [k, g] : spin_spin) {
            (void)g;
            if (!in_range(k.first, n_spins()) || !in_range(k.second, n_spins()) ||
                k.first == k.second)
                throw ConfigError("ModelSpec: bad spin-spin coupling indices");
        }
        for (const auto& [k, g] : mode_spin) {
            (void)g;
            if (!in_range(k.first, n_modes()) || !in_range(k.second, n_spins()))
                throw ConfigError("ModelSpec: bad mode-spin coupling indices");
        }
    }
};

// Convenience constructors for the families used throughout.
inline ModelSpec make_dimer(double omega1, double omega2, double eps1, double eps2,
                            double g) {
    ModelSpec s;
    s.modes = {{omega1, eps1}, {omega2, eps2}};
    s.set_mode_mode(0, 1, g);
    return s;
}

inline ModelSpec make_symmetric_chain(int n, double omega, double eps, double g) {
    ModelSpec s;
    s.modes.assign(n, Mode{omega, eps});
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) s.set_mode_mode(i, j, g);
    return s;
}

enum class Family { dicke_type, rabi_type, two_atom_dicke };

// Scaled thermodynamic-limit families.  dicke_type / rabi_type use the
// bosonic dimer base parameters and the control lambda = 2g/sqrt(w1 w2);
// two_atom_dicke uses (omega, omega_q, g) and control chi.
struct ScaledFamily {
    Family family{Family::dicke_type};
    // bosonic dimer base (dicke_type / rabi_type)
    double omega1{1.0}, omega2{1.0}, eps1{0.1}, eps2{0.1};
    // two-atom Dicke base
    double omega{1.0}, omega_q{0.0}, g{0.5};
    double control{1.0};  // lambda, or chi for two_atom_dicke
    double N{1.0};        // formal scaling parameter, > 0
};

inline ModelSpec instantiate(const ScaledFamily& f) {
    if (!(f.N > 0.0)) throw ConfigError("instantiate: N must be > 0");
    if (!std::isfinite(f.control)) throw ConfigError("instantiate: control not finite");
    ModelSpec s;
    switch (f.family) {
        case Family::dicke_type: {
            const double g = 0.5 * f.control * std::sqrt(f.omega1 * f.omega2);
            s.modes = {{f.omega1, f.eps1 / f.N}, {f.omega2, f.eps2 / f.N}};
            s.set_mode_mode(0, 1, g);
            break;
        }
        case Family::rabi_type: {
            const double g = 0.5 * f.control * std::sqrt(f.omega1 * f.omega2);
            s.modes = {{f.omega1, f.eps1 / f.N}, {f.N * f.omega2, f.eps2 / f.N}};
            s.set_mode_mode(0, 1, std::sqrt(f.N) * g);
            break;
        }
        case Family::two_atom_dicke: {
            s.modes = {{f.omega, 0.0}};
            s.spins = {{f.omega_q}, {f.omega_q}};
            s.set_mode_spin(0, 0, f.g * std::sqrt(f.N));
            s.set_mode_spin(0, 1, f.g * std::sqrt(f.N));
            s.set_spin_spin(0, 1, f.control * f.N);
            break;
        }
        default:
            throw ConfigError("instantiate: unknown family");
    }
    return s;
}

// Full Hamiltonian on a truncated basis, optionally in a displaced frame
// (every ladder operator of mode i is substituted a_i -> a_i + frame[i]).
inline OperatorMatrix build_hamiltonian(const ModelSpec& spec,
                                        std::shared_ptr<const FockBasis> basis,
                                        const Eigen::VectorXd& frame) {
    spec.validate();
    if (basis->n_modes() != spec.n_modes() || basis->n_spins != spec.n_spins())
        throw ShapeError("build_hamiltonian: basis shape does not match spec");
    if (frame.size() != spec.n_modes())
        throw ShapeError("build_hamiltonian: frame length must equal mode count");
    for (int i = 0; i < frame.size(); ++i)
        if (!std::isfinite(frame[i]))
            throw ShapeError("build_hamiltonian: non-finite frame entry");

    const Index dim = basis->dimension;
    SparseMat H(dim, dim);
    for (int i = 0; i < spec.n_modes(); ++i) {
        const double a = frame[i];
        H += spec.modes[i].omega * ladder_op(basis, i, Ladder::number, a).mat;
        if (spec.modes[i].epsilon != 0.0) {
            // normal-ordered Kerr term (a†+α)(a†+α)(a+α)(a+α)
            const SparseMat& an = ladder_op(basis, i, Ladder::annihilate, a).mat;
            const SparseMat& cr = ladder_op(basis, i, Ladder::create, a).mat;
            H += spec.modes[i].epsilon * SparseMat(cr * SparseMat(cr * SparseMat(an * an)));
        }
    }
    for (int k = 0; k < spec.n_spins(); ++k)
        H += 0.5 * spec.spins[k].omega_q * spin_op(basis, k, Axis::z).mat;
    for (const auto& [key, g] : spec.mode_mode) {
        const SparseMat& xi = ladder_op(basis, key.first, Ladder::quadrature, frame[key.first]).mat;
        const SparseMat& xj = ladder_op(basis, key.second, Ladder::quadrature, frame[key.second]).mat;
        H += g * SparseMat(xi * xj);
    }
    for (const auto& [key, g] : spec.mode_spin) {
        const SparseMat& x = ladder_op(basis, key.first, Ladder::quadrature, frame[key.first]).mat;
        H += g * SparseMat(x * spin_op(basis, key.second, Axis::x).mat);
    }
    for (const auto& [key, chi] : spec.spin_spin)
        H += chi * SparseMat(spin_op(basis, key.first, Axis::x).mat *
                             spin_op(basis, key.second, Axis::x).mat);
    H.makeCompressed();
    return {std::move(basis), std::move(H), true};
}

inline OperatorMatrix build_hamiltonian(const ModelSpec& spec,
                                        std::shared_ptr<const FockBasis> basis) {
    return build_hamiltonian(spec, std::move(basis), Eigen::VectorXd::Zero(spec.n_modes()));
}

// Classical energy landscape E(alpha) = sum_i w_i a_i^2 + eps_i a_i^4
// + sum_{i>j} 4 g_ij a_i a_j.  Stationarity of this function is the
// displacement-equation convention used everywhere downstream.
inline double classical_energy(const ModelSpec& spec, const Eigen::VectorXd& alphas) {
    double e = 0.0;
    for (int i = 0; i < spec.n_modes(); ++i) {
        const double a2 = alphas[i] * alphas[i];
        e += spec.modes[i].omega * a2 + spec.modes[i].epsilon * a2 * a2;
    }
    for (const auto& [key, g] : spec.mode_mode)
        e += 4.0 * g * alphas[key.first] * alphas[key.second];
    return e;
}

// Coefficients of the displaced quadratic Hamiltonian
//   H2 = sum_ij A_ij a†_i a_j + 1/2 sum_ij B_ij (a†_i a†_j + a_i a_j) + E0
// with A_ii = w_i + 4 eps_i a_i^2, B_ii = 2 eps_i a_i^2 and
// A_ij = B_ij = g_ij off the diagonal.
struct QuadraticForm {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    double E0{0.0};
    int n_modes() const { return static_cast<int>(A.rows()); }
};

struct QuadraticExpansion {
    QuadraticForm form;
    double discarded{0.0};  // max(|eps_i a_i|, |eps_i|): size of dropped cubic/quartic terms
};

inline QuadraticExpansion quadratic_expansion(const ModelSpec& spec,
                                              const Eigen::VectorXd& alphas) {
    if (spec.n_spins() != 0)
        throw ShapeError("quadratic_expansion: bosonic specs only");
    if (alphas.size() != spec.n_modes())
        throw ShapeError("quadratic_expansion: displacement length mismatch");
    const int n = spec.n_modes();
    QuadraticExpansion out;
    out.form.A = Eigen::MatrixXd::Zero(n, n);
    out.form.B = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const double a2 = alphas[i] * alphas[i];
        const double eps = spec.modes[i].epsilon;
        out.form.A(i, i) = spec.modes[i].omega + 4.0 * eps * a2;
        out.form.B(i, i) = 2.0 * eps * a2;
        out.discarded = std::max({out.discarded, std::abs(eps * alphas[i]), std::abs(eps)});
    }
    for (const auto& [key, g] : spec.mode_mode) {
        out.form.A(key.first, key.second) = out.form.A(key.second, key.first) = g;
        out.form.B(key.first, key.second) = out.form.B(key.second, key.first) = g;
    }
    out.form.E0 = classical_energy(spec, alphas);
    return out;
}

// One sigma_x block of the two-atom extended Dicke model in the USC limit:
//   H_{s1,s2} = w a†a + g sqrt(N) (s1+s2) (a+a†) + chi N s1 s2,
// diagonalized by the displacement alpha = -g sqrt(N) (s1+s2) / w with
// ground energy -[g sqrt(N)(s1+s2)]^2 / w + chi N s1 s2.
//
// The sign of the block constant follows the interaction Hamiltonian
// (+chi N sx sx): the offset is +chi N s1 s2, verified against exact
// diagonalization of the assembled model.
struct DickeBlock {
    ModelSpec mode_block;   // single undriven mode w a†a
    double offset{0.0};     // chi N s1 s2
    double displacement{0.0};
    double ground_energy{0.0};
};

inline DickeBlock block_hamiltonian_2d(const ScaledFamily& f, int s1, int s2) {
    if (f.family != Family::two_atom_dicke)
        throw ConfigError("block_hamiltonian_2d: family must be two_atom_dicke");
    if (std::abs(s1) != 1 || std::abs(s2) != 1)
        throw ShapeError("block_hamiltonian_2d: s1, s2 must be +-1");
    DickeBlock b;
    b.mode_block.modes = {{f.omega, 0.0}};
    const double c = f.g * std::sqrt(f.N) * (s1 + s2);
    b.offset = f.control * f.N * s1 * s2;
    b.displacement = -c / f.omega;
    b.ground_energy = -c * c / f.omega + b.offset;
    return b;
}

// Analytic first-order critical point of the two-atom Dicke model: the
// parallel (displaced) and orthogonal block ground energies cross at
// chi = 2 g^2 / w.
inline double two_atom_crossing(const ScaledFamily& f) {
    return 2.0 * f.g * f.g / f.omega;
}

}  // namespace usc
