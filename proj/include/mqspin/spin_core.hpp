#pragma once

// Zeeman product basis, spin-1/2 operators and density matrices for an
// N-spin cluster. Conventions: hbar = 1, spin operators have eigenvalues
// +-1/2, basis state index = bit pattern read as an unsigned integer with
// bit i set meaning spin i is up.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace mqspin {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr int kDefaultMaxSpins = 12;

/// Cluster size plus the symmetric dipolar coupling matrix D_ij.
struct SpinSystem {
    int n_spins = 0;
    RMatrix couplings;  // symmetric, zero diagonal
    std::string label;

    /// Validates symmetry, zero diagonal and size bounds.
    static SpinSystem make(RMatrix couplings, std::string label,
                           int max_spins = kDefaultMaxSpins);
};

class ZeemanBasis {
public:
    ZeemanBasis() = default;

    int n_spins() const { return n_spins_; }
    std::size_t dim() const { return std::size_t{1} << n_spins_; }

    /// Total magnetization quantum number of a basis state.
    double m(std::size_t state) const { return 0.5 * twice_m_[state]; }
    /// 2m, an exact integer in [-N, N].
    int twice_m(std::size_t state) const { return twice_m_[state]; }
    const std::vector<int>& twice_m_table() const { return twice_m_; }

    /// Coherence order of the matrix element (a, b): m(a) - m(b).
    int order(std::size_t a, std::size_t b) const {
        return (twice_m_[a] - twice_m_[b]) / 2;
    }

    std::size_t index_up() const { return dim() - 1; }
    std::size_t index_down() const { return 0; }
    bool spin_up(std::size_t state, int site) const { return (state >> site) & 1U; }

    /// Number of basis states with the given magnetization.
    std::size_t count_with_m(double m) const;

    friend ZeemanBasis build_basis(int n_spins, int max_spins);

private:
    int n_spins_ = 0;
    std::vector<int> twice_m_;
};

ZeemanBasis build_basis(int n_spins, int max_spins = kDefaultMaxSpins);

enum class SpinComponent { x, y, z, plus, minus };

/// Parses "x", "y", "z", "+", "-" (also "plus"/"minus").
SpinComponent parse_spin_component(const std::string& s);

struct Operator {
    CMatrix matrix;
    bool hermitian = false;

    Operator() = default;
    Operator(CMatrix m, bool is_hermitian);

    Eigen::Index dim() const { return matrix.rows(); }
};

/// ||A - A^dagger|| <= tol * ||A|| (Frobenius).
bool is_hermitian(const CMatrix& m, double tol = 1e-12);

Operator single_spin_op(const ZeemanBasis& basis, int site, SpinComponent kind);
Operator collective_op(const ZeemanBasis& basis, SpinComponent kind);

enum class DensityConvention { full, deviation };

/// Hermitian state matrix. Deviation matrices carry the implicit identity
/// background and are not trace-normalized.
class DensityMatrix {
public:
    DensityMatrix() = default;
    /// Throws NumericalError if the matrix violates the convention's invariants.
    DensityMatrix(CMatrix m, DensityConvention convention = DensityConvention::deviation);

    const CMatrix& matrix() const { return matrix_; }
    DensityConvention convention() const { return convention_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    Complex trace() const { return matrix_.trace(); }
    /// Tr{rho^2}, real for Hermitian rho.
    double purity() const { return matrix_.squaredNorm(); }

private:
    CMatrix matrix_;
    DensityConvention convention_ = DensityConvention::deviation;
};

/// Deviation density matrix of thermal equilibrium: collective I_z.
DensityMatrix thermal_state(const ZeemanBasis& basis);

/// i(|u><d| - |d><u|): the filtered highest-order coherence.
DensityMatrix homq_coherence_state(const ZeemanBasis& basis);

/// Diagonal deviation state with the given populations in the Zeeman basis.
DensityMatrix diagonal_state(const RVector& populations);

}  // namespace mqspin
