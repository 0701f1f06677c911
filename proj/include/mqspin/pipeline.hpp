#pragma once

// End-to-end preparation of the pseudopure ground state:
//   I_z --(+H_dq, t)--> filter order n --(-H_dq, t)--> crush --> saturate,
// with MQ intensities, populations and linear-response spectra recorded at
// every stage.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mqspin/evolution.hpp"
#include "mqspin/hamiltonians.hpp"
#include "mqspin/nonunitary.hpp"
#include "mqspin/spectrum.hpp"

namespace mqspin {

struct SystemSource {
    enum class Kind { hexagon, file };
    Kind kind = Kind::hexagon;
    double d12 = 1.0;
    std::filesystem::path coupling_file;

    SpinSystem load(int max_spins = kDefaultMaxSpins) const;
};

/// Saturation settings; unset center/width fall back to default_saturation_params.
struct SaturationConfig {
    std::optional<double> center_frequency;
    std::optional<double> width_sigma;
    double rate_scale = 1.0;
    double duration = 1.0;
    SaturationMode mode = SaturationMode::steady_state;
    double envelope_cutoff = 1e-3;
};

struct PipelineConfig {
    SystemSource system;
    int max_spins = kDefaultMaxSpins;
    double t_prep = 0.973;  // units of 1/D12
    FrequencyUnit frequency_unit = FrequencyUnit::cyclic;
    double sweep_t_min = 0.0;
    double sweep_t_max = 2.0;
    double sweep_t_step = 0.001;
    std::optional<int> filter_order;  // default: N
    SaturationConfig saturation;
    double secular_scale = 1.0;
    double merge_tolerance = kDefaultMergeTolerance;
    double intensity_floor = kDefaultIntensityFloor;
    double strength_threshold = 1e-10;
    double dominance_floor = 0.1;  // relative bar for "dominant" peak counts
    std::filesystem::path output_dir;  // empty: write nothing

    void validate() const;
};

/// Flat JSON object; see README for the key list. Unknown keys are rejected.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig read_config(const std::filesystem::path& path);

struct PipelineReport {
    int n_spins = 0;
    bool homq_excitable = true;
    std::string frequency_unit;
    int filter_order = 0;
    double t_prep = 0.0;
    double t_star = 0.0;          // located maximum of the order-n fraction
    double t_star_value = 0.0;
    bool t_star_interior = true;
    double f_homq = 0.0;
    double f_convert = 0.0;
    double f_overall = 0.0;
    double p_u_drift = 0.0;
    double deviation_scale = 0.0;  // max |p| before saturation
    double pseudopure_fidelity = 0.0;
    double f_s = 0.0;              // frequency of the transition into |u>
    double u_peak_ratio = 0.0;     // final / equilibrium intensity of that transition
    double purity_initial = 0.0;
    double purity_excited = 0.0;
    double purity_filtered = 0.0;
    double purity_reversed = 0.0;
    double purity_crushed = 0.0;
    double purity_saturated = 0.0;
    std::size_t peaks_equilibrium = 0;
    std::size_t peaks_pre_saturation = 0;
    std::size_t peaks_final = 0;
    std::size_t dominant_peaks_equilibrium = 0;
    std::size_t dominant_peaks_pre_saturation = 0;
    std::size_t dominant_peaks_final = 0;
};

nlohmann::json to_json(const PipelineReport& report);

/// Everything produced by a run, for callers that need more than the report.
struct PipelineRun {
    PipelineReport report;
    SweepTable thermal_sweep;  // from I_z under +H
    SweepTable homq_sweep;     // from i(|u><d| - |d><u|) under -H
    TransitionGraph graph;
    SaturationParams saturation;
    RVector populations_equilibrium;
    RVector populations_pre_saturation;
    RVector populations_final;
    StickSpectrum spectrum_equilibrium;  // merged
    StickSpectrum spectrum_pre_saturation;
    StickSpectrum spectrum_final;
    std::vector<std::pair<std::string, RVector>> stage_intensities;  // I_0..I_N per stage
    std::vector<std::string> warnings;
};

PipelineRun run_pipeline(const PipelineConfig& config);

/// report.json, sweeps, stage populations, MQ intensities, transitions, spectra.
void write_outputs(const PipelineRun& run, const std::filesystem::path& dir);

struct MaximumEstimate {
    double t = 0.0;
    double value = 0.0;
    bool interior = true;
    std::size_t index = 0;
};

/// Global maximum refined by a parabola through the bracketing samples.
/// Endpoint maxima are returned unrefined with interior = false.
MaximumEstimate locate_maximum(const SweepTable& sweep, const std::string& observable);

/// Every interior local maximum whose sampled value is at least min_value, refined.
std::vector<MaximumEstimate> local_maxima(const SweepTable& sweep, const std::string& observable,
                                          double min_value);

/// Pearson correlation of populations with the indicator of one state.
double pseudopure_fidelity(const RVector& populations, std::size_t state);

}  // namespace mqspin
