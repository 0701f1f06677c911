#pragma once

// Coherence-order bookkeeping. Element (a, b) of a density matrix belongs to
// order n = m(a) - m(b).

#include <vector>

#include "mqspin/evolution.hpp"
#include "mqspin/spin_core.hpp"

namespace mqspin {

class MQDecomposition {
public:
    MQDecomposition(int n_spins, std::vector<CMatrix> components);

    int n_spins() const { return n_spins_; }
    /// Component rho_n for n in [-N, N].
    const CMatrix& component(int n) const;
    /// Sum of all components.
    CMatrix sum() const;

private:
    int n_spins_;
    std::vector<CMatrix> components_;  // index n + N
};

MQDecomposition decompose(const DensityMatrix& rho, const ZeemanBasis& basis);

/// Tr{rho_0^2} for n = 0, otherwise the Hermitian-pair intensity
/// Tr{(rho_n + rho_-n)^2} = 2 Tr{rho_n rho_n^dagger}. Summing n = 0..N gives Tr{rho^2}.
double mq_intensity(const MQDecomposition& dec, int n);

/// All pair intensities I_0..I_N straight from the matrix, without building components.
RVector mq_intensities(const CMatrix& rho, const ZeemanBasis& basis);

/// rho_n + rho_-n for n >= 1: the ideal outcome of the order-selective
/// phase-cycle filter.
DensityMatrix filter_order(const DensityMatrix& rho, const ZeemanBasis& basis, int n);

/// Order components by discrete Fourier analysis over k_steps rotations about z:
///   rho_n = (1/K) sum_k e^{+i n phi_k} R(phi_k) rho R(phi_k)^dagger,
///   R(phi) = exp(-i phi I_z), phi_k = 2 pi k / K.
/// Requires K > 2N, otherwise orders alias and ValidationError is thrown.
MQDecomposition phase_cycle_decompose(const DensityMatrix& rho, const ZeemanBasis& basis,
                                      int k_steps, Execution exec = Execution::parallel);

}  // namespace mqspin
