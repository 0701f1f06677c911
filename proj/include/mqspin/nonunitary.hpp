#pragma once

// Gradient-pulse dephasing and partial saturation. Saturation is a classical
// rate equation over eigenstate populations of the secular Hamiltonian:
//   dp_a/dt = sum_b W_ab (p_b - p_a),
//   W_ab = rate_scale * strength_ab * exp(-(w_ab - center)^2 / (2 sigma^2)).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mqspin/spin_core.hpp"

namespace mqspin {

/// All off-diagonal entries set to zero, diagonal kept.
DensityMatrix crush(const DensityMatrix& rho);

/// Eigenstates of an m-conserving Hamiltonian, ordered by m then energy.
struct EigenstateBasis {
    RVector energies;
    CMatrix vectors;  // columns in the Zeeman basis
    std::vector<int> twice_m;
    std::size_t index_up = 0;    // the all-up state (a one-dimensional m block)
    std::size_t index_down = 0;  // the all-down state

    std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

/// Single-quantum transition between eigenstates with m(upper) = m(lower) + 1.
struct Transition {
    std::size_t upper;
    std::size_t lower;
    double frequency;  // E_upper - E_lower
    double strength;   // |<upper|I_+|lower>|^2
};

struct TransitionGraph {
    EigenstateBasis states;
    std::vector<Transition> transitions;

    /// Transitions touching the given eigenstate.
    std::vector<Transition> involving(std::size_t state) const;

    /// Columns a,b,m_a,m_b,frequency,strength (a = upper, b = lower).
    void write_csv(std::ostream& out) const;
};

/// Diagonalizes block by block in m and keeps transitions whose strength exceeds
/// relative_threshold * (largest strength). Throws ValidationError when
/// h_secular mixes different m.
TransitionGraph build_transition_graph(const Operator& h_secular, const ZeemanBasis& basis,
                                       double relative_threshold = 1e-10);

/// Diagonal of rho expressed in the eigenbasis, i.e. the populations left
/// after crushing in that basis.
RVector eigenstate_populations(const DensityMatrix& rho, const EigenstateBasis& states);

enum class SaturationMode { timed, steady_state };

SaturationMode parse_saturation_mode(const std::string& s);
std::string to_string(SaturationMode mode);

struct SaturationParams {
    double center_frequency = 0.0;
    double width_sigma = 1.0;
    double rate_scale = 1.0;
    double duration = 1.0;
    SaturationMode mode = SaturationMode::steady_state;
    /// steady_state only: edges whose envelope is below this fraction of the
    /// peak are not driven.
    double envelope_cutoff = 1e-3;

    void validate() const;
};

/// Center on the transition out of |d>, sigma a quarter of the gap to the
/// transition into |u>. Throws ValidationError if either transition is absent.
SaturationParams default_saturation_params(const TransitionGraph& graph);

/// Symmetric rate matrix W (zero diagonal) for the given parameters. When
/// apply_cutoff is set, rates whose envelope is below envelope_cutoff are dropped.
RMatrix saturation_rates(const TransitionGraph& graph, const SaturationParams& params,
                         bool apply_cutoff);

/// Gaussian envelope value (peak 1) at a frequency.
double saturation_envelope(const SaturationParams& params, double frequency);

RVector saturate(const RVector& populations, const TransitionGraph& graph,
                 const SaturationParams& params);

/// Exact solution p(t) = exp(-L t) p(0), L the rate Laplacian of W.
RVector integrate_rates(const RVector& populations, const RMatrix& rates, double duration);

}  // namespace mqspin
