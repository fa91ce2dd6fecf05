#pragma once

#include <algorithm>
#include <array>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nvc/constants.hpp"
#include "nvc/fields.hpp"
#include "nvc/spin_matrices.hpp"

namespace nvc {

/// Ground-state electronic spin Hamiltonian in angular-frequency units
/// (rad/s), basis |+1>, |0>, |-1>.
///
///   H = 2*pi*(D/h + d_par*E_z/h)(Sz^2 - 2/3) +
///       2*pi*(d_perp/h)[E_x(Sy^2 - Sx^2) + E_y(SxSy + SySx)] +
///       (mu_B g_e/hbar) S.B
inline Matrix3c build_electronic_hamiltonian(const NVParameters& p, const FieldVector& E,
                                             const FieldVector& B,
                                             const PhysicalConstants& c = {}) {
    const auto& s = SpinMatrices::spin1();
    const double two_pi = 2.0 * std::numbers::pi;

    const Matrix3c sz2 = s.sz * s.sz;
    const Matrix3c sx2 = s.sx * s.sx;
    const Matrix3c sy2 = s.sy * s.sy;

    Matrix3c h = two_pi * (p.D_gs_over_h + p.d_par_over_h * E.z) *
                 (sz2 - (2.0 / 3.0) * s.identity);
    h += two_pi * p.d_perp_over_h *
         (E.x * (sy2 - sx2) + E.y * (s.sx * s.sy + s.sy * s.sx));
    h += (c.mu_B * p.g_e / c.hbar) * (B.x * s.sx + B.y * s.sy + B.z * s.sz);
    return h;
}

/// Electronic Hamiltonian plus 14N hyperfine and quadrupole terms on the
/// 9-dimensional product basis |m_s> (x) |m_I>, in rad/s.
inline Matrix9c build_full_hamiltonian(const NVParameters& p, const FieldVector& E,
                                       const FieldVector& B, const PhysicalConstants& c = {}) {
    const auto& s = SpinMatrices::spin1();
    const double two_pi = 2.0 * std::numbers::pi;

    Matrix9c h = kron3(build_electronic_hamiltonian(p, E, B, c), s.identity);
    h += two_pi * p.A_par_over_h * kron3(s.sz, s.sz);
    h += two_pi * p.A_perp_over_h * (kron3(s.sx, s.sx) + kron3(s.sy, s.sy));
    h += two_pi * p.P_over_h * kron3(s.identity, s.sz * s.sz);
    return h;
}

/// Dominant product-basis assignment of an eigenstate: m_s and m_I in
/// {+1, 0, -1}. For 3-level systems m_i is fixed to 0.
struct StateLabel {
    int ms = 0;
    int mi = 0;
};

struct EigenSystem {
    Eigen::VectorXd eigenvalues;   // rad/s, ascending
    Eigen::MatrixXcd eigenvectors; // orthonormal columns
    std::vector<StateLabel> labels;
};

namespace detail {

inline int basis_m(int index) { return 1 - index; }  // 0 -> +1, 1 -> 0, 2 -> -1

inline StateLabel basis_label(int dim, int j) {
    if (dim == 3) return {basis_m(j), 0};
    return {basis_m(j / 3), basis_m(j % 3)};
}

}  // namespace detail

/// Full Hermitian eigendecomposition, eigenvalues ascending. Rejects inputs
/// whose asymmetry exceeds 1e-9 of the largest entry.
inline EigenSystem eigensolve(const Eigen::MatrixXcd& h) {
    const double scale = h.cwiseAbs().maxCoeff();
    const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
    if (asym > 1e-9 * scale) {
        throw std::invalid_argument("eigensolve: matrix is not Hermitian (max asymmetry " +
                                    std::to_string(asym) + " vs scale " + std::to_string(scale) + ")");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigensolve: diagonalization failed");
    }
    EigenSystem es;
    es.eigenvalues = solver.eigenvalues();
    es.eigenvectors = solver.eigenvectors();
    return es;
}

/// Labels every eigenstate with the product-basis state of maximum
/// |overlap|^2. The assignment is a bijection onto the basis labels: a
/// per-state argmax pass first, then a global greedy repair when two states
/// claim the same basis vector. States whose best overlap is below 0.4 are
/// outside the supported field regime and rejected.
inline EigenSystem label_states(EigenSystem es) {
    const int dim = static_cast<int>(es.eigenvalues.size());
    Eigen::MatrixXd overlap(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            overlap(i, j) = std::norm(es.eigenvectors(j, i));

    for (int i = 0; i < dim; ++i) {
        if (overlap.row(i).maxCoeff() < 0.4) {
            throw std::domain_error(
                "label_states: strong mixing, best |overlap|^2 = " +
                std::to_string(overlap.row(i).maxCoeff()) + " for state " + std::to_string(i));
        }
    }

    std::vector<int> assignment(dim, -1);
    std::vector<bool> basis_used(dim, false);
    bool collision = false;
    for (int i = 0; i < dim; ++i) {
        int j = 0;
        overlap.row(i).maxCoeff(&j);
        if (basis_used[j]) { collision = true; break; }
        assignment[i] = j;
        basis_used[j] = true;
    }

    if (collision) {
        // Greedy over all pairs by descending overlap always yields a bijection.
        std::vector<std::pair<int, int>> pairs;
        pairs.reserve(dim * dim);
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j)
                pairs.emplace_back(i, j);
        std::sort(pairs.begin(), pairs.end(), [&](const auto& a, const auto& b) {
            return overlap(a.first, a.second) > overlap(b.first, b.second);
        });
        std::fill(assignment.begin(), assignment.end(), -1);
        std::fill(basis_used.begin(), basis_used.end(), false);
        for (const auto& [i, j] : pairs) {
            if (assignment[i] < 0 && !basis_used[j]) {
                assignment[i] = j;
                basis_used[j] = true;
            }
        }
    }

    es.labels.resize(dim);
    for (int i = 0; i < dim; ++i) es.labels[i] = detail::basis_label(dim, assignment[i]);
    return es;
}

enum class Branch : int { minus = -1, plus = +1 };

struct Resonance {
    double frequency_hz = 0.0;
    Branch branch = Branch::plus;
    int mi = 0;
};

/// The six m_s = 0 -> +-1 transition frequencies, one per (branch, m_I)
/// pair. Branch '+' is the higher line of each m_I pair.
struct ResonanceSet {
    std::array<Resonance, 6> lines;

    const Resonance& line(Branch b, int mi) const {
        for (const auto& r : lines)
            if (r.branch == b && r.mi == mi) return r;
        throw std::logic_error("ResonanceSet: missing (branch, m_I) line");
    }

    std::array<double, 6> frequencies_sorted() const {
        std::array<double, 6> f{};
        for (size_t i = 0; i < 6; ++i) f[i] = lines[i].frequency_hz;
        std::sort(f.begin(), f.end());
        return f;
    }
};

inline ResonanceSet resonance_frequencies(const NVParameters& p, const FieldVector& E,
                                          const FieldVector& B, const PhysicalConstants& c = {}) {
    const EigenSystem es = label_states(eigensolve(build_full_hamiltonian(p, E, B, c)));
    const double two_pi = 2.0 * std::numbers::pi;

    ResonanceSet out;
    int k = 0;
    for (int mi : {-1, 0, +1}) {
        double lam0 = 0.0, lam_a = 0.0, lam_b = 0.0;
        bool have0 = false, have_a = false;
        for (int i = 0; i < 9; ++i) {
            if (es.labels[i].mi != mi) continue;
            if (es.labels[i].ms == 0) {
                lam0 = es.eigenvalues[i];
                have0 = true;
            } else if (!have_a) {
                lam_a = es.eigenvalues[i];
                have_a = true;
            } else {
                lam_b = es.eigenvalues[i];
            }
        }
        if (!have0) throw std::logic_error("resonance_frequencies: missing m_s=0 state");
        const double hi = std::max(lam_a, lam_b);
        const double lo = std::min(lam_a, lam_b);
        out.lines[k++] = {(lo - lam0) / two_pi, Branch::minus, mi};
        out.lines[k++] = {(hi - lam0) / two_pi, Branch::plus, mi};
    }
    return out;
}

struct TwoLevelSplitting {
    double f_plus_hz = 0.0;
    double f_minus_hz = 0.0;

    double splitting_hz() const { return f_plus_hz - f_minus_hz; }
};

/// m_I = 0 line positions from the effective two-level model:
///   f_pm = D/h +- sqrt((g_e mu_B B_z/h)^2 + (d_perp E_perp/h)^2).
inline TwoLevelSplitting effective_two_level_splitting(const NVParameters& p, double e_perp,
                                                       double b_z, const PhysicalConstants& c = {}) {
    const double zeeman = p.zeeman_hz(b_z, c);
    const double stark = p.d_perp_over_h * e_perp;
    const double root = std::hypot(zeeman, stark);
    return {p.D_gs_over_h + root, p.D_gs_over_h - root};
}

/// Mixing angle of the m_s = +-1 pair, tan(theta) = d_perp E_perp / (g_e mu_B B_z).
inline double mixing_angle(const NVParameters& p, double e_perp, double b_z,
                           const PhysicalConstants& c = {}) {
    const double stark = p.d_perp_over_h * e_perp;
    const double zeeman = p.zeeman_hz(b_z, c);
    if (stark == 0.0 && zeeman == 0.0) {
        throw std::domain_error("mixing_angle: undefined for E_perp = 0 and B_z = 0");
    }
    return std::atan2(stark, zeeman);
}

/// Relative microwave transition rate |<S_pm|S_x|S_0>|^2 of the mixed
/// eigenstates, normalized so the two branches sum to 1.
inline double transition_rate(double theta, double phi_e, Branch branch) {
    const double sign = (branch == Branch::plus) ? 1.0 : -1.0;
    return 0.5 * (1.0 - sign * std::sin(theta) * std::cos(phi_e));
}

}  // namespace nvc
