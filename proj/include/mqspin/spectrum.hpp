#pragma once

// Linear-response (small flip angle) stick spectra: one line per
// single-quantum transition, intensity (p_lower - p_upper) * |<upper|I_+|lower>|^2.
// Frequencies are relative to the carrier, in coupling units.

#include <iosfwd>
#include <span>
#include <vector>

#include "mqspin/nonunitary.hpp"

namespace mqspin {

struct SpectralLine {
    double frequency;
    double intensity;
};

struct StickSpectrum {
    std::vector<SpectralLine> lines;
    bool merged = false;
    double merge_tolerance = 0.0;

    double total_intensity() const;
    double max_abs_intensity() const;
    /// Columns frequency,intensity.
    void write_csv(std::ostream& out) const;
};

inline constexpr double kDefaultMergeTolerance = 1e-6;
inline constexpr double kDefaultIntensityFloor = 1e-8;

StickSpectrum linear_response(const RVector& populations, const TransitionGraph& graph);

/// Clusters lines whose consecutive sorted frequencies lie within tolerance,
/// sums intensities, and places the cluster at the |intensity|-weighted mean
/// frequency. Clusters summing to below floor * max |intensity| are dropped.
StickSpectrum merge_peaks(const StickSpectrum& spectrum, double tolerance,
                          double floor = kDefaultIntensityFloor);

/// Lines with |intensity| > intensity_floor * max |intensity|. Requires a merged spectrum.
std::size_t count_peaks(const StickSpectrum& spectrum,
                        double intensity_floor = kDefaultIntensityFloor);

/// Sum of Lorentzians I / (1 + ((f - f0)/linewidth)^2) sampled on the grid.
std::vector<double> broaden(const StickSpectrum& spectrum, double linewidth,
                            std::span<const double> grid);

/// Columns frequency,amplitude.
void write_curve_csv(std::ostream& out, std::span<const double> grid,
                     std::span<const double> amplitude);

}  // namespace mqspin
