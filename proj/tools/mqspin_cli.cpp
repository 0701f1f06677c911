// mqspin command-line front end: sweep, pipeline, spectrum, filter-check.
// Exit codes: 0 success, 1 validation error, 2 numerical-invariant violation.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mqspin/error.hpp"
#include "mqspin/hamiltonians.hpp"
#include "mqspin/kernels.hpp"
#include "mqspin/mq.hpp"
#include "mqspin/observables.hpp"
#include "mqspin/pipeline.hpp"
#include "mqspin/spectrum.hpp"

namespace fs = std::filesystem;
using namespace mqspin;

namespace {

SystemSource parse_system(const std::vector<std::string>& args, double d12) {
    SystemSource src;
    src.d12 = d12;
    if (args.empty() || args[0] == "hexagon") {
        if (args.size() > 1) throw ValidationError("--system hexagon takes no path");
        return src;
    }
    if (args[0] == "file") {
        if (args.size() != 2) throw ValidationError("--system file needs a PATH");
        src.kind = SystemSource::Kind::file;
        src.coupling_file = args[1];
        return src;
    }
    throw ValidationError("--system must be 'hexagon' or 'file PATH'");
}

std::ofstream open_in(const fs::path& dir, const std::string& name) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory " + dir.string());
    std::ofstream out(dir / name);
    if (!out) throw ValidationError("cannot write " + (dir / name).string());
    return out;
}

RVector read_populations(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open population file " + path.string());
    std::vector<double> values;
    std::string token;
    while (in >> token) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(token, &used));
            if (used != token.size()) throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw ValidationError("population file " + path.string() + ": bad number '" + token + "'");
        }
    }
    return Eigen::Map<RVector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

struct SweepOptions {
    std::vector<std::string> system{"hexagon"};
    double d12 = 1.0;
    double t_min = 0.0;
    double t_max = 2.0;
    double t_step = 0.001;
    std::string observables = "Fall";
    std::string initial = "thermal";
    bool reverse = false;
    std::string unit = "cyclic";
    std::string out = "out";
};

int run_sweep(const SweepOptions& o) {
    const SpinSystem system = parse_system(o.system, o.d12).load();
    const ZeemanBasis basis = build_basis(system.n_spins);
    if (!homq_excitable(system.n_spins)) {
        std::cerr << "warning: N = " << system.n_spins << " is not of the form 2 + 4n\n";
    }
    DensityMatrix rho0;
    if (o.initial == "thermal") {
        rho0 = thermal_state(basis);
    } else if (o.initial == "homq") {
        rho0 = homq_coherence_state(basis);
    } else {
        throw ValidationError("--initial must be 'thermal' or 'homq'");
    }
    Operator h = dq_hamiltonian(system, basis);
    if (o.reverse) h = negated(h);
    const auto obs = parse_observables(o.observables, basis, rho0.purity());
    const auto grid = uniform_grid(o.t_min, o.t_max, o.t_step);
    const SweepTable table =
        sweep(rho0, h, grid, obs, phase_per_time(parse_frequency_unit(o.unit)));
    auto out = open_in(o.out, "sweep.csv");
    table.write_csv(out);
    std::cout << "wrote " << (fs::path(o.out) / "sweep.csv").string() << " (" << grid.size()
              << " points, " << obs.size() << " observables)\n";
    return 0;
}

int run_pipeline_cmd(const std::string& config_path, const std::string& out_dir) {
    PipelineConfig config = config_path.empty() ? PipelineConfig{} : read_config(config_path);
    if (!out_dir.empty()) config.output_dir = out_dir;
    if (config.output_dir.empty()) config.output_dir = "out";
    const PipelineRun run = run_pipeline(config);
    std::cout << to_json(run.report).dump(2) << '\n';
    return 0;
}

struct SpectrumOptions {
    std::vector<std::string> system{"hexagon"};
    double d12 = 1.0;
    std::vector<std::string> state{"thermal"};
    double linewidth = 0.02;
    double merge_tol = kDefaultMergeTolerance;
    double floor = kDefaultIntensityFloor;
    std::size_t points = 4001;
    std::string out = "out";
};

int run_spectrum(const SpectrumOptions& o) {
    const SpinSystem system = parse_system(o.system, o.d12).load();
    const ZeemanBasis basis = build_basis(system.n_spins);
    const TransitionGraph graph =
        build_transition_graph(secular_dipolar_hamiltonian(system, basis), basis);

    RVector pops;
    const std::string& kind = o.state.at(0);
    if (kind == "thermal") {
        pops = eigenstate_populations(thermal_state(basis), graph.states);
    } else if (kind == "cat-diag") {
        RVector diag = RVector::Zero(static_cast<Eigen::Index>(basis.dim()));
        diag(static_cast<Eigen::Index>(basis.index_up())) = 1.0;
        diag(static_cast<Eigen::Index>(basis.index_down())) = -1.0;
        pops = eigenstate_populations(diagonal_state(diag), graph.states);
    } else if (kind == "pseudopure-file") {
        if (o.state.size() != 2) throw ValidationError("--state pseudopure-file needs a PATH");
        pops = read_populations(o.state[1]);
        if (pops.size() != static_cast<Eigen::Index>(graph.states.size())) {
            throw ValidationError("population file has " + std::to_string(pops.size()) +
                                  " entries, expected " + std::to_string(graph.states.size()));
        }
    } else {
        throw ValidationError("--state must be thermal, cat-diag or pseudopure-file PATH");
    }

    const StickSpectrum merged = merge_peaks(linear_response(pops, graph), o.merge_tol, o.floor);
    const std::size_t peaks = count_peaks(merged, o.floor);

    double lo = -1.0, hi = 1.0;
    if (!merged.lines.empty()) {
        lo = merged.lines.front().frequency;
        hi = merged.lines.back().frequency;
    }
    lo -= 10.0 * o.linewidth;
    hi += 10.0 * o.linewidth;
    if (o.points < 2) throw ValidationError("--points must be at least 2");
    std::vector<double> grid(o.points);
    for (std::size_t i = 0; i < o.points; ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(o.points - 1);
    }
    const auto curve = broaden(merged, o.linewidth, grid);

    auto sticks = open_in(o.out, "sticks.csv");
    merged.write_csv(sticks);
    auto broadened = open_in(o.out, "broadened.csv");
    write_curve_csv(broadened, grid, curve);
    std::cout << "state " << kind << ": " << peaks << " peaks (merge tolerance " << o.merge_tol
              << ")\n";
    return 0;
}

int run_filter_check(std::uint64_t seed, int k_steps, int spins, int trials) {
    const ZeemanBasis basis = build_basis(spins);
    if (k_steps == 0) k_steps = 2 * spins + 2;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    const auto dim = static_cast<Eigen::Index>(basis.dim());
    double worst = 0.0;
    for (int trial = 0; trial < trials; ++trial) {
        CMatrix a(dim, dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            for (Eigen::Index i = 0; i < dim; ++i) a(i, j) = Complex(gauss(rng), gauss(rng));
        }
        const DensityMatrix rho(0.5 * (a + a.adjoint()));
        const MQDecomposition direct = decompose(rho, basis);
        const MQDecomposition cycled = phase_cycle_decompose(rho, basis, k_steps);
        for (int n = -spins; n <= spins; ++n) {
            worst = std::max(worst,
                             (direct.component(n) - cycled.component(n)).cwiseAbs().maxCoeff());
        }
    }
    std::cout << "filter-check: " << trials << " random states, N = " << spins
              << ", K = " << k_steps << ", max elementwise deviation " << worst << '\n';
    if (worst > 1e-10) {
        std::cerr << "phase-cycle decomposition disagrees with direct decomposition\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiple-quantum pseudopure state preparation simulator"};
    app.require_subcommand(1);

    SweepOptions sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Time sweep of MQ observables (CSV)");
    sweep_cmd->add_option("--system", sw.system, "hexagon | file PATH")->expected(1, 2);
    sweep_cmd->add_option("--d12", sw.d12, "Nearest-neighbour coupling of the hexagon");
    sweep_cmd->add_option("--t-min", sw.t_min, "Grid start, units of 1/D12");
    sweep_cmd->add_option("--t-max", sw.t_max, "Grid end, units of 1/D12");
    sweep_cmd->add_option("--t-step", sw.t_step, "Grid step, units of 1/D12");
    sweep_cmd->add_option("--observables", sw.observables,
                          "Comma list: I<n>,F<n>,Iall,Fall,diag_pair,diag_pair_frac,p<s>,re_ud,im_ud");
    sweep_cmd->add_option("--initial", sw.initial, "thermal | homq");
    sweep_cmd->add_flag("--reverse", sw.reverse, "Evolve under the negated Hamiltonian");
    sweep_cmd->add_option("--frequency-unit", sw.unit, "cyclic | angular");
    sweep_cmd->add_option("--out", sw.out, "Output directory");

    std::string config_path;
    std::string pipeline_out;
    auto* pipe_cmd = app.add_subcommand("pipeline", "Full preparation sequence with report");
    pipe_cmd->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    pipe_cmd->add_option("--out", pipeline_out, "Output directory (overrides config)");

    SpectrumOptions sp;
    auto* spec_cmd = app.add_subcommand("spectrum", "Linear-response spectrum of a diagonal state");
    spec_cmd->add_option("--system", sp.system, "hexagon | file PATH")->expected(1, 2);
    spec_cmd->add_option("--d12", sp.d12, "Nearest-neighbour coupling of the hexagon");
    spec_cmd->add_option("--state", sp.state, "thermal | cat-diag | pseudopure-file PATH")
        ->expected(1, 2);
    spec_cmd->add_option("--linewidth", sp.linewidth, "Lorentzian half width");
    spec_cmd->add_option("--merge-tol", sp.merge_tol, "Peak merge tolerance");
    spec_cmd->add_option("--floor", sp.floor, "Relative intensity floor");
    spec_cmd->add_option("--points", sp.points, "Broadened curve samples");
    spec_cmd->add_option("--out", sp.out, "Output directory");

    std::uint64_t seed = 1;
    int k_steps = 0;
    int spins = 6;
    int trials = 100;
    auto* check_cmd =
        app.add_subcommand("filter-check", "Phase-cycle vs direct order decomposition");
    check_cmd->add_option("--seed", seed, "RNG seed");
    check_cmd->add_option("--k-steps", k_steps, "Phase-cycle steps (default 2N+2)");
    check_cmd->add_option("--spins", spins, "Cluster size");
    check_cmd->add_option("--trials", trials, "Random states");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*sweep_cmd) return run_sweep(sw);
        if (*pipe_cmd) return run_pipeline_cmd(config_path, pipeline_out);
        if (*spec_cmd) return run_spectrum(sp);
        if (*check_cmd) return run_filter_check(seed, k_steps, spins, trials);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
