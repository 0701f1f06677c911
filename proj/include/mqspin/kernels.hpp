#pragma once

// Hot loops, in an OpenMP version and a serial reference kept for testing
// and benchmarking. Both versions must produce identical results up to
// floating-point summation order.

#include <span>
#include <vector>

#include "mqspin/evolution.hpp"

namespace mqspin::kernels {

/// rows = phases, cols = observables. phase is the propagator argument H t.
RMatrix evaluate_grid_serial(const EigenSystem& es, const CMatrix& rho0,
                             std::span<const double> phases,
                             std::span<const Observable> observables);
RMatrix evaluate_grid_parallel(const EigenSystem& es, const CMatrix& rho0,
                               std::span<const double> phases,
                               std::span<const Observable> observables);

/// Fourier components over z-rotations. iz_diag is the diagonal of total I_z;
/// returns components for orders -n_max..n_max.
std::vector<CMatrix> phase_cycle_serial(const CMatrix& rho, const RVector& iz_diag, int n_max,
                                        int k_steps);
std::vector<CMatrix> phase_cycle_parallel(const CMatrix& rho, const RVector& iz_diag, int n_max,
                                          int k_steps);

/// Number of threads the parallel kernels will use.
int max_threads();

}  // namespace mqspin::kernels
