#include "mqspin/kernels.hpp"

#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mqspin::kernels {

namespace {

// rho(phase) written into `work`, using the eigenbasis image of rho0.
void state_at(const EigenSystem& es, const CMatrix& rho0_eig, double phase, CMatrix& scratch,
              CMatrix& work) {
    const Eigen::Index dim = rho0_eig.rows();
    for (Eigen::Index k = 0; k < dim; ++k) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double angle = -(es.eigenvalues(j) - es.eigenvalues(k)) * phase;
            scratch(j, k) = rho0_eig(j, k) * Complex(std::cos(angle), std::sin(angle));
        }
    }
    work.noalias() = es.eigenvectors * scratch;
    scratch.noalias() = work * es.eigenvectors.adjoint();
    work = 0.5 * (scratch + scratch.adjoint());
}

CMatrix rotated(const CMatrix& rho, const RVector& iz_diag, double phi) {
    // R(phi) = exp(-i phi I_z), diagonal
    const Eigen::VectorXcd r = (iz_diag * phi).unaryExpr(
        [](double a) { return Complex(std::cos(a), -std::sin(a)); });
    return r.asDiagonal() * rho * r.conjugate().asDiagonal();
}

}  // namespace

RMatrix evaluate_grid_serial(const EigenSystem& es, const CMatrix& rho0,
                             std::span<const double> phases,
                             std::span<const Observable> observables) {
    const Eigen::Index dim = rho0.rows();
    const CMatrix rho0_eig = es.eigenvectors.adjoint() * rho0 * es.eigenvectors;
    RMatrix out(static_cast<Eigen::Index>(phases.size()),
                static_cast<Eigen::Index>(observables.size()));
    CMatrix scratch(dim, dim);
    CMatrix work(dim, dim);
    for (std::size_t i = 0; i < phases.size(); ++i) {
        state_at(es, rho0_eig, phases[i], scratch, work);
        for (std::size_t o = 0; o < observables.size(); ++o) {
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) =
                observables[o].extract(work);
        }
    }
    return out;
}

RMatrix evaluate_grid_parallel(const EigenSystem& es, const CMatrix& rho0,
                               std::span<const double> phases,
                               std::span<const Observable> observables) {
    const Eigen::Index dim = rho0.rows();
    const CMatrix rho0_eig = es.eigenvectors.adjoint() * rho0 * es.eigenvectors;
    const auto n_points = static_cast<std::int64_t>(phases.size());
    RMatrix out(static_cast<Eigen::Index>(phases.size()),
                static_cast<Eigen::Index>(observables.size()));
#pragma omp parallel
    {
        CMatrix scratch(dim, dim);
        CMatrix work(dim, dim);
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < n_points; ++i) {
            state_at(es, rho0_eig, phases[static_cast<std::size_t>(i)], scratch, work);
            for (std::size_t o = 0; o < observables.size(); ++o) {
                out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) =
                    observables[o].extract(work);
            }
        }
    }
    return out;
}

std::vector<CMatrix> phase_cycle_serial(const CMatrix& rho, const RVector& iz_diag, int n_max,
                                        int k_steps) {
    const Eigen::Index dim = rho.rows();
    std::vector<CMatrix> acc(static_cast<std::size_t>(2 * n_max + 1), CMatrix::Zero(dim, dim));
    for (int k = 0; k < k_steps; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / k_steps;
        const CMatrix r = rotated(rho, iz_diag, phi);
        for (int n = -n_max; n <= n_max; ++n) {
            acc[static_cast<std::size_t>(n + n_max)] += std::polar(1.0, n * phi) * r;
        }
    }
    for (auto& c : acc) c /= static_cast<double>(k_steps);
    return acc;
}

std::vector<CMatrix> phase_cycle_parallel(const CMatrix& rho, const RVector& iz_diag, int n_max,
                                          int k_steps) {
    const Eigen::Index dim = rho.rows();
    const std::size_t n_orders = static_cast<std::size_t>(2 * n_max + 1);
    std::vector<CMatrix> acc(n_orders, CMatrix::Zero(dim, dim));
#pragma omp parallel
    {
        std::vector<CMatrix> local(n_orders, CMatrix::Zero(dim, dim));
#pragma omp for schedule(static)
        for (int k = 0; k < k_steps; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / k_steps;
            const CMatrix r = rotated(rho, iz_diag, phi);
            for (int n = -n_max; n <= n_max; ++n) {
                local[static_cast<std::size_t>(n + n_max)] += std::polar(1.0, n * phi) * r;
            }
        }
#pragma omp critical
        for (std::size_t i = 0; i < n_orders; ++i) acc[i] += local[i];
    }
    for (auto& c : acc) c /= static_cast<double>(k_steps);
    return acc;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace mqspin::kernels
