#include "mqspin/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <set>

#include "mqspin/error.hpp"
#include "mqspin/mq.hpp"
#include "mqspin/observables.hpp"

namespace mqspin {

namespace {

constexpr double kPurityTol = 1e-10;

std::string order_name(char prefix, int n) { return prefix + std::to_string(n); }

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    try {
        return it->get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("config key '") + key + "': " + e.what());
    }
}

void check_purity_kept(double before, double after, const char* stage) {
    if (std::abs(after - before) > kPurityTol * std::max(before, 1.0)) {
        throw NumericalError(std::string("Tr{rho^2} changed during ") + stage);
    }
}

void check_purity_not_increased(double before, double after, const char* stage) {
    if (after > before * (1.0 + kPurityTol) + 1e-14) {
        throw NumericalError(std::string("Tr{rho^2} increased during ") + stage);
    }
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write " + path.string());
    return out;
}

}  // namespace

SpinSystem SystemSource::load(int max_spins) const {
    if (kind == Kind::hexagon) return hexagon_couplings(d12);
    return load_couplings(coupling_file, max_spins);
}

void PipelineConfig::validate() const {
    if (!(t_prep > 0.0) || !std::isfinite(t_prep)) {
        throw ValidationError("preparation time must be positive");
    }
    if (!(sweep_t_step > 0.0)) throw ValidationError("sweep step must be positive");
    if (!(sweep_t_max > sweep_t_min)) throw ValidationError("sweep range is empty");
    if (filter_order && *filter_order < 1) throw ValidationError("filter order must be >= 1");
    if (!(merge_tolerance > 0.0)) throw ValidationError("merge tolerance must be positive");
    if (!(intensity_floor >= 0.0)) throw ValidationError("intensity floor must be non-negative");
    if (!(strength_threshold >= 0.0)) {
        throw ValidationError("strength threshold must be non-negative");
    }
    if (!(dominance_floor > 0.0 && dominance_floor < 1.0)) {
        throw ValidationError("dominance floor must lie in (0, 1)");
    }
    if (!(secular_scale != 0.0) || !std::isfinite(secular_scale)) {
        throw ValidationError("secular scale must be finite and non-zero");
    }
    if (system.kind == SystemSource::Kind::file && system.coupling_file.empty()) {
        throw ValidationError("system 'file' needs coupling_file");
    }
}

PipelineConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("pipeline config must be a JSON object");
    static const std::set<std::string> known = {
        "system",           "d12",           "coupling_file",     "max_spins",
        "t_prep",           "frequency_unit", "sweep_t_min",      "sweep_t_max",
        "sweep_t_step",     "filter_order",  "saturation_center", "saturation_width",
        "saturation_rate",  "saturation_duration", "saturation_mode", "saturation_envelope_cutoff",
        "secular_scale",    "merge_tolerance", "intensity_floor", "strength_threshold", "dominance_floor",
        "output_dir"};
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ValidationError("unknown config key '" + key + "'");
    }

    PipelineConfig c;
    const auto system = get_or<std::string>(j, "system", "hexagon");
    if (system == "hexagon") {
        c.system.kind = SystemSource::Kind::hexagon;
    } else if (system == "file") {
        c.system.kind = SystemSource::Kind::file;
    } else {
        throw ValidationError("config 'system' must be 'hexagon' or 'file'");
    }
    c.system.d12 = get_or(j, "d12", c.system.d12);
    c.system.coupling_file = get_or<std::string>(j, "coupling_file", "");
    c.max_spins = get_or(j, "max_spins", c.max_spins);
    c.t_prep = get_or(j, "t_prep", c.t_prep);
    c.frequency_unit =
        parse_frequency_unit(get_or<std::string>(j, "frequency_unit", to_string(c.frequency_unit)));
    c.sweep_t_min = get_or(j, "sweep_t_min", c.sweep_t_min);
    c.sweep_t_max = get_or(j, "sweep_t_max", c.sweep_t_max);
    c.sweep_t_step = get_or(j, "sweep_t_step", c.sweep_t_step);
    if (j.contains("filter_order") && !j["filter_order"].is_null()) {
        c.filter_order = get_or(j, "filter_order", 0);
    }
    if (j.contains("saturation_center") && !j["saturation_center"].is_null()) {
        c.saturation.center_frequency = get_or(j, "saturation_center", 0.0);
    }
    if (j.contains("saturation_width") && !j["saturation_width"].is_null()) {
        c.saturation.width_sigma = get_or(j, "saturation_width", 0.0);
    }
    c.saturation.rate_scale = get_or(j, "saturation_rate", c.saturation.rate_scale);
    c.saturation.duration = get_or(j, "saturation_duration", c.saturation.duration);
    c.saturation.mode = parse_saturation_mode(
        get_or<std::string>(j, "saturation_mode", to_string(c.saturation.mode)));
    c.saturation.envelope_cutoff =
        get_or(j, "saturation_envelope_cutoff", c.saturation.envelope_cutoff);
    c.secular_scale = get_or(j, "secular_scale", c.secular_scale);
    c.merge_tolerance = get_or(j, "merge_tolerance", c.merge_tolerance);
    c.intensity_floor = get_or(j, "intensity_floor", c.intensity_floor);
    c.strength_threshold = get_or(j, "strength_threshold", c.strength_threshold);
    c.dominance_floor = get_or(j, "dominance_floor", c.dominance_floor);
    c.output_dir = get_or<std::string>(j, "output_dir", "");
    c.validate();
    return c;
}

PipelineConfig read_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config " + path.string());
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config " + path.string() + ": " + e.what());
    }
    PipelineConfig c = config_from_json(j);
    // relative coupling files resolve against the config's directory
    if (c.system.kind == SystemSource::Kind::file && c.system.coupling_file.is_relative()) {
        c.system.coupling_file = path.parent_path() / c.system.coupling_file;
    }
    return c;
}

nlohmann::json to_json(const PipelineReport& r) {
    return nlohmann::json{
        {"n_spins", r.n_spins},
        {"homq_excitable", r.homq_excitable},
        {"frequency_unit", r.frequency_unit},
        {"filter_order", r.filter_order},
        {"t_prep", r.t_prep},
        {"t_star", r.t_star},
        {"t_star_value", r.t_star_value},
        {"t_star_interior", r.t_star_interior},
        {"f_homq", r.f_homq},
        {"f_convert", r.f_convert},
        {"f_overall", r.f_overall},
        {"p_u_drift", r.p_u_drift},
        {"deviation_scale", r.deviation_scale},
        {"pseudopure_fidelity", r.pseudopure_fidelity},
        {"f_s", r.f_s},
        {"u_peak_ratio", r.u_peak_ratio},
        {"purity_initial", r.purity_initial},
        {"purity_excited", r.purity_excited},
        {"purity_filtered", r.purity_filtered},
        {"purity_reversed", r.purity_reversed},
        {"purity_crushed", r.purity_crushed},
        {"purity_saturated", r.purity_saturated},
        {"peaks_equilibrium", r.peaks_equilibrium},
        {"peaks_pre_saturation", r.peaks_pre_saturation},
        {"peaks_final", r.peaks_final},
        {"dominant_peaks_equilibrium", r.dominant_peaks_equilibrium},
        {"dominant_peaks_pre_saturation", r.dominant_peaks_pre_saturation},
        {"dominant_peaks_final", r.dominant_peaks_final},
    };
}

double pseudopure_fidelity(const RVector& populations, std::size_t state) {
    const auto n = populations.size();
    if (static_cast<Eigen::Index>(state) >= n || n < 2) {
        throw ValidationError("fidelity target state out of range");
    }
    RVector indicator = RVector::Zero(n);
    indicator(static_cast<Eigen::Index>(state)) = 1.0;
    const RVector x = populations.array() - populations.mean();
    const RVector y = indicator.array() - indicator.mean();
    const double denom = x.norm() * y.norm();
    if (denom == 0.0) return 0.0;
    return x.dot(y) / denom;
}

namespace {

MaximumEstimate refine(const std::vector<double>& t, const RVector& y, std::size_t i) {
    MaximumEstimate est{t[i], y(static_cast<Eigen::Index>(i)), true, i};
    const double t0 = t[i - 1], t1 = t[i], t2 = t[i + 1];
    const double y0 = y(static_cast<Eigen::Index>(i - 1));
    const double y1 = y(static_cast<Eigen::Index>(i));
    const double y2 = y(static_cast<Eigen::Index>(i + 1));
    // Lagrange parabola through the three samples
    const double d01 = (y1 - y0) / (t1 - t0);
    const double d12 = (y2 - y1) / (t2 - t1);
    const double curvature = (d12 - d01) / (t2 - t0);
    if (curvature >= 0.0) return est;
    const double slope = d01 - curvature * (t0 + t1);
    const double t_peak = -slope / (2.0 * curvature);
    if (t_peak < t0 || t_peak > t2) return est;
    const double c0 = y0 - d01 * t0 + curvature * t0 * t1;
    est.t = t_peak;
    est.value = curvature * t_peak * t_peak + slope * t_peak + c0;
    return est;
}

}  // namespace

MaximumEstimate locate_maximum(const SweepTable& sweep, const std::string& observable) {
    const RVector y = sweep.column(observable);
    const auto& t = sweep.times();
    Eigen::Index best = 0;
    y.maxCoeff(&best);
    const auto i = static_cast<std::size_t>(best);
    if (i == 0 || i + 1 == t.size()) return MaximumEstimate{t[i], y(best), false, i};
    return refine(t, y, i);
}

std::vector<MaximumEstimate> local_maxima(const SweepTable& sweep, const std::string& observable,
                                          double min_value) {
    const RVector y = sweep.column(observable);
    const auto& t = sweep.times();
    std::vector<MaximumEstimate> out;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        if (y(k) >= min_value && y(k) > y(k - 1) && y(k) >= y(k + 1)) out.push_back(refine(t, y, i));
    }
    return out;
}

PipelineRun run_pipeline(const PipelineConfig& config) {
    config.validate();
    const SpinSystem system = config.system.load(config.max_spins);
    const ZeemanBasis basis = build_basis(system.n_spins, config.max_spins);
    const int n_spins = system.n_spins;
    const int order = config.filter_order.value_or(n_spins);
    if (order > n_spins) {
        throw ValidationError("filter order " + std::to_string(order) + " exceeds N = " +
                              std::to_string(n_spins));
    }

    std::vector<std::string> warnings;
    if (!homq_excitable(n_spins)) {
        warnings.push_back("N = " + std::to_string(n_spins) +
                           " is not of the form 2 + 4n; the order-N coherence is not excited");
    }
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';

    const Operator h_dq = dq_hamiltonian(system, basis);
    const EigenSystem forward = diagonalize(h_dq);
    const EigenSystem backward = diagonalize(negated(h_dq));
    const double scale = phase_per_time(config.frequency_unit);
    const double phase = scale * config.t_prep;

    // (0) sweeps: order-n fraction from thermal; 0Q and diagonal pair from the HOMQ state
    const DensityMatrix rho0 = thermal_state(basis);
    const DensityMatrix homq0 = homq_coherence_state(basis);
    const auto grid = uniform_grid(config.sweep_t_min, config.sweep_t_max, config.sweep_t_step);
    std::vector<Observable> thermal_obs = parse_observables("Fall", basis, rho0.purity());
    thermal_obs.push_back(homq_element_observable(basis, true));
    thermal_obs.push_back(homq_element_observable(basis, false));
    SweepTable thermal_sweep = sweep(rho0, forward, grid, thermal_obs, scale);
    const std::vector<Observable> homq_obs =
        parse_observables("F0,diag_pair_frac", basis, homq0.purity());
    SweepTable homq_sweep = sweep(homq0, backward, grid, homq_obs, scale);
    const MaximumEstimate t_star = locate_maximum(thermal_sweep, order_name('F', order));

    // (1) excitation, (2) filter, (3) time reversal
    const DensityMatrix excited = evolve(rho0, forward, phase);
    const DensityMatrix filtered = filter_order(excited, basis, order);
    const DensityMatrix reversed = evolve(filtered, backward, phase);

    PipelineReport r;
    r.n_spins = n_spins;
    r.homq_excitable = homq_excitable(n_spins);
    r.frequency_unit = to_string(config.frequency_unit);
    r.filter_order = order;
    r.t_prep = config.t_prep;
    r.t_star = t_star.t;
    r.t_star_value = t_star.value;
    r.t_star_interior = t_star.interior;
    r.purity_initial = rho0.purity();
    r.purity_excited = excited.purity();
    r.purity_filtered = filtered.purity();
    r.purity_reversed = reversed.purity();
    check_purity_kept(r.purity_initial, r.purity_excited, "excitation");
    check_purity_kept(r.purity_filtered, r.purity_reversed, "time reversal");
    check_purity_not_increased(r.purity_excited, r.purity_filtered, "filtering");

    const auto u = static_cast<Eigen::Index>(basis.index_up());
    const auto d = static_cast<Eigen::Index>(basis.index_down());
    const double diag_pair =
        std::norm(reversed.matrix()(u, u)) + std::norm(reversed.matrix()(d, d));
    r.f_homq = r.purity_filtered / r.purity_initial;
    r.f_convert = r.purity_filtered > 0.0 ? diag_pair / r.purity_filtered : 0.0;
    r.f_overall = diag_pair / r.purity_initial;

    // (4) crush in the secular eigenbasis, then saturate
    const Operator h_sec = secular_dipolar_hamiltonian(system, basis, config.secular_scale);
    TransitionGraph graph = build_transition_graph(h_sec, basis, config.strength_threshold);
    const auto& states = graph.states;

    SaturationParams sat;
    const bool need_defaults =
        !config.saturation.center_frequency || !config.saturation.width_sigma;
    if (need_defaults) sat = default_saturation_params(graph);
    if (config.saturation.center_frequency) sat.center_frequency = *config.saturation.center_frequency;
    if (config.saturation.width_sigma) sat.width_sigma = *config.saturation.width_sigma;
    sat.rate_scale = config.saturation.rate_scale;
    sat.duration = config.saturation.duration;
    sat.mode = config.saturation.mode;
    sat.envelope_cutoff = config.saturation.envelope_cutoff;
    sat.validate();

    RVector pops_eq = eigenstate_populations(rho0, states);
    RVector pops_pre = eigenstate_populations(reversed, states);
    RVector pops_final = saturate(pops_pre, graph, sat);
    r.purity_crushed = pops_pre.squaredNorm();
    r.purity_saturated = pops_final.squaredNorm();
    check_purity_not_increased(r.purity_reversed, r.purity_crushed, "crushing");
    check_purity_not_increased(r.purity_crushed, r.purity_saturated, "saturation");
    if (std::abs(pops_final.sum() - pops_pre.sum()) > 1e-12 * std::max(1.0, pops_pre.cwiseAbs().sum())) {
        throw NumericalError("saturation did not conserve total population");
    }

    const auto iu = static_cast<Eigen::Index>(states.index_up);
    r.deviation_scale = pops_pre.cwiseAbs().maxCoeff();
    r.p_u_drift = pops_final(iu) - pops_pre(iu);
    r.pseudopure_fidelity = pseudopure_fidelity(pops_final, states.index_up);

    // spectra
    const StickSpectrum raw_eq = linear_response(pops_eq, graph);
    const StickSpectrum raw_final = linear_response(pops_final, graph);
    StickSpectrum spec_eq = merge_peaks(raw_eq, config.merge_tolerance, config.intensity_floor);
    StickSpectrum spec_pre = merge_peaks(linear_response(pops_pre, graph), config.merge_tolerance,
                                         config.intensity_floor);
    StickSpectrum spec_final = merge_peaks(raw_final, config.merge_tolerance, config.intensity_floor);
    r.peaks_equilibrium = count_peaks(spec_eq, config.intensity_floor);
    r.peaks_pre_saturation = count_peaks(spec_pre, config.intensity_floor);
    r.peaks_final = count_peaks(spec_final, config.intensity_floor);
    r.dominant_peaks_equilibrium = count_peaks(spec_eq, config.dominance_floor);
    r.dominant_peaks_pre_saturation = count_peaks(spec_pre, config.dominance_floor);
    r.dominant_peaks_final = count_peaks(spec_final, config.dominance_floor);

    double u_eq = 0.0;
    double u_final = 0.0;
    for (std::size_t k = 0; k < graph.transitions.size(); ++k) {
        if (graph.transitions[k].upper == states.index_up) {
            r.f_s = graph.transitions[k].frequency;
            u_eq += raw_eq.lines[k].intensity;
            u_final += raw_final.lines[k].intensity;
        }
    }
    r.u_peak_ratio = u_eq != 0.0 ? u_final / u_eq : 0.0;

    std::vector<std::pair<std::string, RVector>> stages = {
        {"initial", mq_intensities(rho0.matrix(), basis)},
        {"excited", mq_intensities(excited.matrix(), basis)},
        {"filtered", mq_intensities(filtered.matrix(), basis)},
        {"reversed", mq_intensities(reversed.matrix(), basis)},
    };

    PipelineRun run{r,
                    std::move(thermal_sweep),
                    std::move(homq_sweep),
                    std::move(graph),
                    sat,
                    std::move(pops_eq),
                    std::move(pops_pre),
                    std::move(pops_final),
                    std::move(spec_eq),
                    std::move(spec_pre),
                    std::move(spec_final),
                    std::move(stages),
                    std::move(warnings)};
    if (!config.output_dir.empty()) write_outputs(run, config.output_dir);
    return run;
}

void write_outputs(const PipelineRun& run, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir.string());

    {
        auto out = open_output(dir / "report.json");
        // max_digits10 (17 significant digits) for doubles
        out << to_json(run.report).dump(2) << '\n';
    }
    {
        auto out = open_output(dir / "sweep_thermal.csv");
        run.thermal_sweep.write_csv(out);
    }
    {
        auto out = open_output(dir / "sweep_homq.csv");
        run.homq_sweep.write_csv(out);
    }
    {
        auto out = open_output(dir / "transitions.csv");
        run.graph.write_csv(out);
    }
    {
        auto out = open_output(dir / "populations.csv");
        out.precision(15);
        out << "state,m,energy,equilibrium,pre_saturation,final\n";
        const auto& st = run.graph.states;
        for (std::size_t k = 0; k < st.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            out << k << ',' << 0.5 * st.twice_m[k] << ',' << st.energies(i) << ','
                << run.populations_equilibrium(i) << ',' << run.populations_pre_saturation(i)
                << ',' << run.populations_final(i) << '\n';
        }
    }
    {
        auto out = open_output(dir / "final_populations.txt");
        out.precision(17);
        for (Eigen::Index i = 0; i < run.populations_final.size(); ++i) {
            out << run.populations_final(i) << '\n';
        }
    }
    {
        auto out = open_output(dir / "mq_stages.csv");
        out.precision(15);
        out << "stage";
        const auto n = run.stage_intensities.front().second.size();
        for (Eigen::Index k = 0; k < n; ++k) out << ",I" << k;
        out << '\n';
        for (const auto& [name, values] : run.stage_intensities) {
            out << name;
            for (Eigen::Index k = 0; k < n; ++k) out << ',' << values(k);
            out << '\n';
        }
    }
    const std::pair<const char*, const StickSpectrum*> spectra[] = {
        {"spectrum_equilibrium.csv", &run.spectrum_equilibrium},
        {"spectrum_pre_saturation.csv", &run.spectrum_pre_saturation},
        {"spectrum_final.csv", &run.spectrum_final},
    };
    for (const auto& [name, spec] : spectra) {
        auto out = open_output(dir / name);
        spec->write_csv(out);
    }
}

}  // namespace mqspin
