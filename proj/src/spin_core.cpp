#include "mqspin/spin_core.hpp"

#include <bit>
#include <cmath>

#include "mqspin/error.hpp"

namespace mqspin {

namespace {

constexpr double kHermitianTol = 1e-12;

void check_site(const ZeemanBasis& basis, int site) {
    if (site < 0 || site >= basis.n_spins()) {
        throw ValidationError("spin site " + std::to_string(site) + " out of range [0, " +
                              std::to_string(basis.n_spins()) + ")");
    }
}

}  // namespace

SpinSystem SpinSystem::make(RMatrix couplings, std::string label, int max_spins) {
    const auto n = couplings.rows();
    if (couplings.cols() != n) {
        throw ValidationError("coupling matrix must be square");
    }
    if (n < 2 || n > max_spins) {
        throw ValidationError("cluster size " + std::to_string(n) + " outside [2, " +
                              std::to_string(max_spins) + "]");
    }
    const double scale = std::max(1.0, couplings.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!std::isfinite(couplings(i, i)) || couplings(i, i) != 0.0) {
            throw ValidationError("coupling matrix must have zero diagonal");
        }
        for (Eigen::Index j = i + 1; j < n; ++j) {
            if (!std::isfinite(couplings(i, j)) || !std::isfinite(couplings(j, i))) {
                throw ValidationError("coupling matrix has non-finite entries");
            }
            if (std::abs(couplings(i, j) - couplings(j, i)) > 1e-12 * scale) {
                throw ValidationError("coupling matrix is not symmetric at (" + std::to_string(i) +
                                      ", " + std::to_string(j) + ")");
            }
        }
    }
    // store the exactly symmetric part
    RMatrix sym = 0.5 * (couplings + couplings.transpose());
    return SpinSystem{static_cast<int>(n), std::move(sym), std::move(label)};
}

std::size_t ZeemanBasis::count_with_m(double m) const {
    const double twice = 2.0 * m;
    const int target = static_cast<int>(std::lround(twice));
    if (std::abs(twice - target) > 1e-9) return 0;
    std::size_t count = 0;
    for (int v : twice_m_) count += (v == target);
    return count;
}

ZeemanBasis build_basis(int n_spins, int max_spins) {
    if (n_spins < 1 || n_spins > max_spins) {
        throw ValidationError("number of spins " + std::to_string(n_spins) + " outside [1, " +
                              std::to_string(max_spins) + "]");
    }
    ZeemanBasis basis;
    basis.n_spins_ = n_spins;
    const std::size_t dim = std::size_t{1} << n_spins;
    basis.twice_m_.resize(dim);
    for (std::size_t s = 0; s < dim; ++s) {
        const int ups = std::popcount(static_cast<std::uint64_t>(s));
        basis.twice_m_[s] = 2 * ups - n_spins;
    }
    return basis;
}

SpinComponent parse_spin_component(const std::string& s) {
    if (s == "x") return SpinComponent::x;
    if (s == "y") return SpinComponent::y;
    if (s == "z") return SpinComponent::z;
    if (s == "+" || s == "plus") return SpinComponent::plus;
    if (s == "-" || s == "minus") return SpinComponent::minus;
    throw ValidationError("unknown spin operator component '" + s + "'");
}

bool is_hermitian(const CMatrix& m, double tol) {
    if (m.rows() != m.cols()) return false;
    const double norm = m.norm();
    return (m - m.adjoint()).norm() <= tol * std::max(norm, 1e-300);
}

Operator::Operator(CMatrix m, bool is_hermitian_flag)
    : matrix(std::move(m)), hermitian(is_hermitian_flag) {
    if (hermitian && !is_hermitian(matrix, kHermitianTol)) {
        throw NumericalError("operator flagged hermitian is not");
    }
}

Operator single_spin_op(const ZeemanBasis& basis, int site, SpinComponent kind) {
    check_site(basis, site);
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    CMatrix m = CMatrix::Zero(dim, dim);
    const std::size_t mask = std::size_t{1} << site;
    const Complex i_unit(0.0, 1.0);
    for (std::size_t s = 0; s < basis.dim(); ++s) {
        const bool up = (s & mask) != 0;
        const auto col = static_cast<Eigen::Index>(s);
        const auto flipped = static_cast<Eigen::Index>(s ^ mask);
        switch (kind) {
            case SpinComponent::z:
                m(col, col) = up ? 0.5 : -0.5;
                break;
            case SpinComponent::plus:
                if (!up) m(flipped, col) = 1.0;
                break;
            case SpinComponent::minus:
                if (up) m(flipped, col) = 1.0;
                break;
            case SpinComponent::x:
                m(flipped, col) = 0.5;
                break;
            case SpinComponent::y:
                // I_y = (I_+ - I_-) / 2i
                m(flipped, col) = up ? 0.5 * i_unit : -0.5 * i_unit;
                break;
        }
    }
    const bool herm = kind == SpinComponent::x || kind == SpinComponent::y ||
                      kind == SpinComponent::z;
    return Operator(std::move(m), herm);
}

Operator collective_op(const ZeemanBasis& basis, SpinComponent kind) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    CMatrix total = CMatrix::Zero(dim, dim);
    for (int site = 0; site < basis.n_spins(); ++site) {
        total += single_spin_op(basis, site, kind).matrix;
    }
    const bool herm = kind == SpinComponent::x || kind == SpinComponent::y ||
                      kind == SpinComponent::z;
    return Operator(std::move(total), herm);
}

DensityMatrix::DensityMatrix(CMatrix m, DensityConvention convention)
    : matrix_(std::move(m)), convention_(convention) {
    if (matrix_.rows() != matrix_.cols()) {
        throw ValidationError("density matrix must be square");
    }
    if (!is_hermitian(matrix_, kHermitianTol)) {
        throw NumericalError("density matrix is not Hermitian");
    }
    if (convention_ == DensityConvention::full) {
        if (std::abs(matrix_.trace() - Complex(1.0, 0.0)) > 1e-12) {
            throw NumericalError("full density matrix must have unit trace");
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> es(matrix_, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10) {
            throw NumericalError("full density matrix has a negative eigenvalue");
        }
    }
}

DensityMatrix thermal_state(const ZeemanBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    CMatrix rho = CMatrix::Zero(dim, dim);
    for (Eigen::Index s = 0; s < dim; ++s) rho(s, s) = basis.m(static_cast<std::size_t>(s));
    return DensityMatrix(std::move(rho));
}

DensityMatrix homq_coherence_state(const ZeemanBasis& basis) {
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    CMatrix rho = CMatrix::Zero(dim, dim);
    const auto u = static_cast<Eigen::Index>(basis.index_up());
    const auto d = static_cast<Eigen::Index>(basis.index_down());
    rho(u, d) = Complex(0.0, 1.0);
    rho(d, u) = Complex(0.0, -1.0);
    return DensityMatrix(std::move(rho));
}

DensityMatrix diagonal_state(const RVector& populations) {
    CMatrix rho = CMatrix::Zero(populations.size(), populations.size());
    rho.diagonal() = populations.cast<Complex>();
    return DensityMatrix(std::move(rho));
}

}  // namespace mqspin
