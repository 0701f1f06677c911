#include "mqspin/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "mqspin/error.hpp"

namespace mqspin {

double StickSpectrum::total_intensity() const {
    double total = 0.0;
    for (const auto& l : lines) total += l.intensity;
    return total;
}

double StickSpectrum::max_abs_intensity() const {
    double best = 0.0;
    for (const auto& l : lines) best = std::max(best, std::abs(l.intensity));
    return best;
}

void StickSpectrum::write_csv(std::ostream& out) const {
    const auto old_precision = out.precision(15);
    out << "frequency,intensity\n";
    for (const auto& l : lines) out << l.frequency << ',' << l.intensity << '\n';
    out.precision(old_precision);
}

StickSpectrum linear_response(const RVector& populations, const TransitionGraph& graph) {
    if (populations.size() != static_cast<Eigen::Index>(graph.states.size())) {
        throw ValidationError("populations are not over the transition graph's eigenstates");
    }
    StickSpectrum out;
    out.lines.reserve(graph.transitions.size());
    for (const auto& t : graph.transitions) {
        const double diff = populations(static_cast<Eigen::Index>(t.lower)) -
                            populations(static_cast<Eigen::Index>(t.upper));
        out.lines.push_back(SpectralLine{t.frequency, diff * t.strength});
    }
    return out;
}

StickSpectrum merge_peaks(const StickSpectrum& spectrum, double tolerance, double floor) {
    if (!(tolerance > 0.0)) throw ValidationError("merge tolerance must be positive");
    std::vector<SpectralLine> sorted = spectrum.lines;
    std::sort(sorted.begin(), sorted.end(),
              [](const SpectralLine& a, const SpectralLine& b) { return a.frequency < b.frequency; });

    std::vector<SpectralLine> clusters;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j].frequency - sorted[j - 1].frequency <= tolerance) ++j;
        double intensity = 0.0;
        double weight = 0.0;
        double weighted_freq = 0.0;
        double plain_freq = 0.0;
        for (std::size_t k = i; k < j; ++k) {
            intensity += sorted[k].intensity;
            weight += std::abs(sorted[k].intensity);
            weighted_freq += std::abs(sorted[k].intensity) * sorted[k].frequency;
            plain_freq += sorted[k].frequency;
        }
        const double freq = weight > 0.0 ? weighted_freq / weight
                                         : plain_freq / static_cast<double>(j - i);
        clusters.push_back(SpectralLine{freq, intensity});
        i = j;
    }

    double max_abs = 0.0;
    for (const auto& c : clusters) max_abs = std::max(max_abs, std::abs(c.intensity));
    StickSpectrum out;
    out.merged = true;
    out.merge_tolerance = tolerance;
    for (const auto& c : clusters) {
        if (max_abs > 0.0 && std::abs(c.intensity) >= floor * max_abs) out.lines.push_back(c);
    }
    return out;
}

std::size_t count_peaks(const StickSpectrum& spectrum, double intensity_floor) {
    if (!spectrum.merged) throw ValidationError("count_peaks needs a merged spectrum");
    const double max_abs = spectrum.max_abs_intensity();
    if (max_abs == 0.0) return 0;
    return static_cast<std::size_t>(
        std::count_if(spectrum.lines.begin(), spectrum.lines.end(), [&](const SpectralLine& l) {
            return std::abs(l.intensity) > intensity_floor * max_abs;
        }));
}

std::vector<double> broaden(const StickSpectrum& spectrum, double linewidth,
                            std::span<const double> grid) {
    if (!(linewidth > 0.0)) throw ValidationError("linewidth must be positive");
    if (grid.empty()) throw ValidationError("frequency grid is empty");
    std::vector<double> curve(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
        double total = 0.0;
        for (const auto& l : spectrum.lines) {
            const double x = (grid[g] - l.frequency) / linewidth;
            total += l.intensity / (1.0 + x * x);
        }
        curve[g] = total;
    }
    return curve;
}

void write_curve_csv(std::ostream& out, std::span<const double> grid,
                     std::span<const double> amplitude) {
    if (grid.size() != amplitude.size()) throw ValidationError("curve and grid lengths differ");
    const auto old_precision = out.precision(15);
    out << "frequency,amplitude\n";
    for (std::size_t i = 0; i < grid.size(); ++i) out << grid[i] << ',' << amplitude[i] << '\n';
    out.precision(old_precision);
}

}  // namespace mqspin
