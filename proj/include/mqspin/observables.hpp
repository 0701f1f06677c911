#pragma once

#include <string>
#include <vector>

#include "mqspin/evolution.hpp"

namespace mqspin {

/// "I<n>": pair intensity of order n, divided by norm.
Observable mq_intensity_observable(const ZeemanBasis& basis, int n, double norm = 1.0,
                                   std::string name = {});

/// |rho_uu|^2 + |rho_dd|^2, divided by norm.
Observable diag_pair_observable(const ZeemanBasis& basis, double norm = 1.0,
                                std::string name = "diag_pair");

/// Real diagonal element rho_ss.
Observable population_observable(std::size_t state);

/// Re or Im of rho(u, d).
Observable homq_element_observable(const ZeemanBasis& basis, bool real_part);

/// Comma-separated observable list. Recognized names:
///   I<n>, F<n> (I<n> / norm), Iall (I0..IN), Fall, diag_pair, diag_pair_frac,
///   p<state>, re_ud, im_ud.
/// norm is the Tr{rho(0)^2} used by the fractional forms.
std::vector<Observable> parse_observables(const std::string& list, const ZeemanBasis& basis,
                                          double norm);

}  // namespace mqspin
