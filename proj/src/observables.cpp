#include "mqspin/observables.hpp"

#include <charconv>
#include <sstream>

#include "mqspin/error.hpp"
#include "mqspin/mq.hpp"

namespace mqspin {

namespace {

bool parse_index(std::string_view text, long& value) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, value);
    return ec == std::errc{} && ptr == end;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

}  // namespace

Observable mq_intensity_observable(const ZeemanBasis& basis, int n, double norm,
                                   std::string name) {
    if (n < 0 || n > basis.n_spins()) {
        throw ValidationError("observable order " + std::to_string(n) + " outside [0, " +
                              std::to_string(basis.n_spins()) + "]");
    }
    if (!(norm > 0.0)) throw ValidationError("observable normalization must be positive");
    if (name.empty()) name = "I" + std::to_string(n);
    // single-order pass; avoids computing every order per call
    return Observable{std::move(name), [twice_m = basis.twice_m_table(), n, norm](const CMatrix& rho) {
                          double total = 0.0;
                          const Eigen::Index dim = rho.rows();
                          for (Eigen::Index b = 0; b < dim; ++b) {
                              const int mb = twice_m[static_cast<std::size_t>(b)];
                              for (Eigen::Index a = 0; a < dim; ++a) {
                                  const int diff = twice_m[static_cast<std::size_t>(a)] - mb;
                                  if (diff == 2 * n || diff == -2 * n) total += std::norm(rho(a, b));
                              }
                          }
                          return total / norm;
                      }};
}

Observable diag_pair_observable(const ZeemanBasis& basis, double norm, std::string name) {
    if (!(norm > 0.0)) throw ValidationError("observable normalization must be positive");
    const auto u = static_cast<Eigen::Index>(basis.index_up());
    const auto d = static_cast<Eigen::Index>(basis.index_down());
    return Observable{std::move(name), [u, d, norm](const CMatrix& rho) {
                          return (std::norm(rho(u, u)) + std::norm(rho(d, d))) / norm;
                      }};
}

Observable population_observable(std::size_t state) {
    const auto s = static_cast<Eigen::Index>(state);
    return Observable{"p" + std::to_string(state),
                      [s](const CMatrix& rho) { return rho(s, s).real(); }};
}

Observable homq_element_observable(const ZeemanBasis& basis, bool real_part) {
    const auto u = static_cast<Eigen::Index>(basis.index_up());
    const auto d = static_cast<Eigen::Index>(basis.index_down());
    return Observable{real_part ? "re_ud" : "im_ud", [u, d, real_part](const CMatrix& rho) {
                          return real_part ? rho(u, d).real() : rho(u, d).imag();
                      }};
}

std::vector<Observable> parse_observables(const std::string& list, const ZeemanBasis& basis,
                                          double norm) {
    std::vector<Observable> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const std::string name = trim(item);
        if (name.empty()) continue;
        long index = 0;
        if (name == "Iall" || name == "Fall") {
            const bool frac = name[0] == 'F';
            for (int n = 0; n <= basis.n_spins(); ++n) {
                out.push_back(mq_intensity_observable(basis, n, frac ? norm : 1.0,
                                                      (frac ? "F" : "I") + std::to_string(n)));
            }
        } else if ((name[0] == 'I' || name[0] == 'F') &&
                   parse_index(std::string_view(name).substr(1), index)) {
            const bool frac = name[0] == 'F';
            out.push_back(mq_intensity_observable(basis, static_cast<int>(index),
                                                  frac ? norm : 1.0, name));
        } else if (name == "diag_pair") {
            out.push_back(diag_pair_observable(basis, 1.0, name));
        } else if (name == "diag_pair_frac") {
            out.push_back(diag_pair_observable(basis, norm, name));
        } else if (name == "re_ud" || name == "im_ud") {
            out.push_back(homq_element_observable(basis, name == "re_ud"));
        } else if (name[0] == 'p' && parse_index(std::string_view(name).substr(1), index)) {
            if (index < 0 || static_cast<std::size_t>(index) >= basis.dim()) {
                throw ValidationError("population index out of range in '" + name + "'");
            }
            out.push_back(population_observable(static_cast<std::size_t>(index)));
        } else {
            throw ValidationError("unknown observable '" + name + "'");
        }
    }
    if (out.empty()) throw ValidationError("observable list is empty");
    return out;
}

}  // namespace mqspin
