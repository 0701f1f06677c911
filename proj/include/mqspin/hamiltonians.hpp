#pragma once

#include <filesystem>

#include "mqspin/spin_core.hpp"

namespace mqspin {

/// Regular hexagon of six spins: ring distance 1, 2, 3 get d12, d12/(3 sqrt 3), d12/8.
SpinSystem hexagon_couplings(double d12);

/// Reads "N" followed by an N x N whitespace-separated symmetric matrix.
SpinSystem load_couplings(const std::filesystem::path& path, int max_spins = kDefaultMaxSpins);

/// Double-quantum effective Hamiltonian
///   H = -(1/2) sum_{i<j} D_ij (I_i+ I_j+ + I_i- I_j-).
/// Built directly from bit flips; every element connects states whose m
/// differs by exactly 2.
Operator dq_hamiltonian(const SpinSystem& system, const ZeemanBasis& basis);

/// Time-reversal partner of a Hamiltonian (elementwise negation).
Operator negated(const Operator& h);

/// Truncated (secular) dipolar Hamiltonian
///   H = scale * sum_{i<j} D_ij (2 I_iz I_jz - (1/2)(I_i+ I_j- + I_i- I_j+)).
/// Commutes with total I_z.
Operator secular_dipolar_hamiltonian(const SpinSystem& system, const ZeemanBasis& basis,
                                     double scale = 1.0);

/// The all-up/all-down coherence is reachable by a double-quantum Hamiltonian
/// only when N = 2 + 4n.
constexpr bool homq_excitable(int n_spins) { return n_spins >= 2 && n_spins % 4 == 2; }

}  // namespace mqspin
