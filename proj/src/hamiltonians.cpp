#include "mqspin/hamiltonians.hpp"

#include <cmath>
#include <fstream>

#include "mqspin/error.hpp"

namespace mqspin {

namespace {

void check_sizes(const SpinSystem& system, const ZeemanBasis& basis) {
    if (system.n_spins != basis.n_spins() || system.couplings.rows() != system.n_spins) {
        throw ValidationError("spin system has " + std::to_string(system.n_spins) +
                              " spins but basis has " + std::to_string(basis.n_spins()));
    }
}

}  // namespace

SpinSystem hexagon_couplings(double d12) {
    if (!(d12 > 0.0) || !std::isfinite(d12)) {
        throw ValidationError("hexagon nearest-neighbour coupling must be positive");
    }
    constexpr int n = 6;
    const double by_distance[] = {0.0, d12, d12 / (3.0 * std::sqrt(3.0)), d12 / 8.0};
    RMatrix d = RMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const int k = std::abs(i - j);
            d(i, j) = by_distance[std::min(k, n - k)];
        }
    }
    return SpinSystem::make(std::move(d), "hexagon");
}

SpinSystem load_couplings(const std::filesystem::path& path, int max_spins) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open coupling file " + path.string());
    long n = 0;
    if (!(in >> n) || n < 2 || n > max_spins) {
        throw ValidationError("coupling file " + path.string() +
                              ": first token must be a cluster size in [2, " +
                              std::to_string(max_spins) + "]");
    }
    RMatrix d(n, n);
    for (long i = 0; i < n; ++i) {
        for (long j = 0; j < n; ++j) {
            if (!(in >> d(i, j))) {
                throw ValidationError("coupling file " + path.string() + ": expected " +
                                      std::to_string(n * n) + " matrix entries");
            }
        }
    }
    std::string extra;
    if (in >> extra) {
        throw ValidationError("coupling file " + path.string() + ": trailing data '" + extra + "'");
    }
    return SpinSystem::make(std::move(d), path.filename().string(), max_spins);
}

Operator dq_hamiltonian(const SpinSystem& system, const ZeemanBasis& basis) {
    check_sizes(system, basis);
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    const int n = system.n_spins;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (std::size_t s = 0; s < basis.dim(); ++s) {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double dij = system.couplings(i, j);
                if (dij == 0.0) continue;
                const bool ui = basis.spin_up(s, i);
                const bool uj = basis.spin_up(s, j);
                // I_i+ I_j+ raises a down-down pair; I_i- I_j- lowers an up-up pair.
                if (ui == uj) {
                    const std::size_t t = s ^ (std::size_t{1} << i) ^ (std::size_t{1} << j);
                    h(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(s)) += -0.5 * dij;
                }
            }
        }
    }
    return Operator(std::move(h), true);
}

Operator negated(const Operator& h) { return Operator(-h.matrix, h.hermitian); }

Operator secular_dipolar_hamiltonian(const SpinSystem& system, const ZeemanBasis& basis,
                                     double scale) {
    check_sizes(system, basis);
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    const int n = system.n_spins;
    CMatrix h = CMatrix::Zero(dim, dim);
    for (std::size_t s = 0; s < basis.dim(); ++s) {
        const auto col = static_cast<Eigen::Index>(s);
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double dij = scale * system.couplings(i, j);
                if (dij == 0.0) continue;
                const bool ui = basis.spin_up(s, i);
                const bool uj = basis.spin_up(s, j);
                // 2 I_iz I_jz = +-1/2
                h(col, col) += dij * (ui == uj ? 0.5 : -0.5);
                if (ui != uj) {
                    const std::size_t t = s ^ (std::size_t{1} << i) ^ (std::size_t{1} << j);
                    h(static_cast<Eigen::Index>(t), col) += -0.5 * dij;
                }
            }
        }
    }
    return Operator(std::move(h), true);
}

}  // namespace mqspin
