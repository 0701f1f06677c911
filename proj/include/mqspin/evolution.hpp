#pragma once

// Exact propagation rho(t) = U rho U^dagger, U = exp(-i H t), via a single
// Hermitian eigendecomposition, and time sweeps of named observables.

#include <functional>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "mqspin/spin_core.hpp"

namespace mqspin {

struct EigenSystem {
    RVector eigenvalues;   // ascending
    CMatrix eigenvectors;  // columns, unitary
};

/// Throws ValidationError for operators not flagged Hermitian.
EigenSystem diagonalize(const Operator& h);

DensityMatrix evolve(const DensityMatrix& rho, const Operator& h, double t);
DensityMatrix evolve(const DensityMatrix& rho, const EigenSystem& es, double t);

/// How a dimensionless time t (units of 1/D12) maps onto the propagator
/// argument: angular treats D as rad/s (phase D t), cyclic as Hz (phase 2 pi D t).
enum class FrequencyUnit { angular, cyclic };

constexpr double phase_per_time(FrequencyUnit unit) {
    return unit == FrequencyUnit::cyclic ? 2.0 * std::numbers::pi : 1.0;
}
FrequencyUnit parse_frequency_unit(const std::string& s);
std::string to_string(FrequencyUnit unit);

/// Real-valued quantity extracted from rho(t). Extractors must be pure.
struct Observable {
    std::string name;
    std::function<double(const CMatrix&)> extract;
};

enum class Execution { serial, parallel };

class SweepTable {
public:
    SweepTable(std::vector<double> times, std::vector<std::string> names, RMatrix values);

    const std::vector<double>& times() const { return times_; }
    const std::vector<std::string>& names() const { return names_; }
    const RMatrix& values() const { return values_; }

    bool has(const std::string& name) const;
    /// Throws ValidationError when absent.
    RVector column(const std::string& name) const;

    /// Header `t,<names...>`, one row per grid point.
    void write_csv(std::ostream& out) const;

private:
    std::vector<double> times_;
    std::vector<std::string> names_;
    RMatrix values_;  // rows: times, cols: observables
};

/// Uniform grid [t_min, t_max] with the given step; the endpoint is included
/// when it lies on the grid to within 1e-9 of a step.
std::vector<double> uniform_grid(double t_min, double t_max, double step);

/// Evaluates every observable at every grid time. time_scale multiplies t
/// before it enters the propagator (see phase_per_time).
SweepTable sweep(const DensityMatrix& rho0, const Operator& h, std::span<const double> grid,
                 std::span<const Observable> observables, double time_scale = 1.0,
                 Execution exec = Execution::parallel);

SweepTable sweep(const DensityMatrix& rho0, const EigenSystem& es, std::span<const double> grid,
                 std::span<const Observable> observables, double time_scale = 1.0,
                 Execution exec = Execution::parallel);

}  // namespace mqspin
