#include "mqspin/mq.hpp"

#include <cmath>

#include "mqspin/error.hpp"
#include "mqspin/kernels.hpp"

namespace mqspin {

namespace {

void check_dims(const DensityMatrix& rho, const ZeemanBasis& basis) {
    if (rho.dim() != static_cast<Eigen::Index>(basis.dim())) {
        throw ValidationError("density matrix dimension " + std::to_string(rho.dim()) +
                              " does not match basis dimension " + std::to_string(basis.dim()));
    }
}

}  // namespace

MQDecomposition::MQDecomposition(int n_spins, std::vector<CMatrix> components)
    : n_spins_(n_spins), components_(std::move(components)) {
    if (components_.size() != static_cast<std::size_t>(2 * n_spins_ + 1)) {
        throw ValidationError("decomposition needs 2N+1 order components");
    }
}

const CMatrix& MQDecomposition::component(int n) const {
    if (n < -n_spins_ || n > n_spins_) {
        throw ValidationError("coherence order " + std::to_string(n) + " outside [-" +
                              std::to_string(n_spins_) + ", " + std::to_string(n_spins_) + "]");
    }
    return components_[static_cast<std::size_t>(n + n_spins_)];
}

CMatrix MQDecomposition::sum() const {
    CMatrix total = CMatrix::Zero(components_.front().rows(), components_.front().cols());
    for (const auto& c : components_) total += c;
    return total;
}

MQDecomposition decompose(const DensityMatrix& rho, const ZeemanBasis& basis) {
    check_dims(rho, basis);
    const int n = basis.n_spins();
    const Eigen::Index dim = rho.dim();
    std::vector<CMatrix> parts(static_cast<std::size_t>(2 * n + 1), CMatrix::Zero(dim, dim));
    const auto& m = rho.matrix();
    for (Eigen::Index b = 0; b < dim; ++b) {
        for (Eigen::Index a = 0; a < dim; ++a) {
            const int order = basis.order(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
            parts[static_cast<std::size_t>(order + n)](a, b) = m(a, b);
        }
    }
    return MQDecomposition(n, std::move(parts));
}

double mq_intensity(const MQDecomposition& dec, int n) {
    if (n < 0 || n > dec.n_spins()) {
        throw ValidationError("intensity order " + std::to_string(n) + " outside [0, " +
                              std::to_string(dec.n_spins()) + "]");
    }
    if (n == 0) return dec.component(0).squaredNorm();
    return dec.component(n).squaredNorm() + dec.component(-n).squaredNorm();
}

RVector mq_intensities(const CMatrix& rho, const ZeemanBasis& basis) {
    const int n = basis.n_spins();
    RVector out = RVector::Zero(n + 1);
    const auto& twice_m = basis.twice_m_table();
    const Eigen::Index dim = rho.rows();
    for (Eigen::Index b = 0; b < dim; ++b) {
        const int mb = twice_m[static_cast<std::size_t>(b)];
        for (Eigen::Index a = 0; a < dim; ++a) {
            const int order = std::abs(twice_m[static_cast<std::size_t>(a)] - mb) / 2;
            out(order) += std::norm(rho(a, b));
        }
    }
    return out;
}

DensityMatrix filter_order(const DensityMatrix& rho, const ZeemanBasis& basis, int n) {
    check_dims(rho, basis);
    if (n < 1 || n > basis.n_spins()) {
        throw ValidationError("filter order " + std::to_string(n) + " outside [1, " +
                              std::to_string(basis.n_spins()) + "]");
    }
    const Eigen::Index dim = rho.dim();
    CMatrix out = CMatrix::Zero(dim, dim);
    for (Eigen::Index b = 0; b < dim; ++b) {
        for (Eigen::Index a = 0; a < dim; ++a) {
            const int order = basis.order(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
            if (order == n || order == -n) out(a, b) = rho.matrix()(a, b);
        }
    }
    return DensityMatrix(std::move(out), DensityConvention::deviation);
}

MQDecomposition phase_cycle_decompose(const DensityMatrix& rho, const ZeemanBasis& basis,
                                      int k_steps, Execution exec) {
    check_dims(rho, basis);
    const int n = basis.n_spins();
    if (k_steps <= 2 * n) {
        throw ValidationError("phase cycle with " + std::to_string(k_steps) +
                              " steps aliases coherence orders; need more than " +
                              std::to_string(2 * n));
    }
    const Operator iz = collective_op(basis, SpinComponent::z);
    const RVector iz_diag = iz.matrix.diagonal().real();
    auto parts = exec == Execution::parallel
                     ? kernels::phase_cycle_parallel(rho.matrix(), iz_diag, n, k_steps)
                     : kernels::phase_cycle_serial(rho.matrix(), iz_diag, n, k_steps);
    return MQDecomposition(n, std::move(parts));
}

}  // namespace mqspin
