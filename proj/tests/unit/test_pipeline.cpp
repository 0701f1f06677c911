#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "mqspin/error.hpp"
#include "mqspin/pipeline.hpp"

using namespace mqspin;
using nlohmann::json;

namespace {

const PipelineRun& hexagon_run() {
    static const PipelineRun run = [] {
        PipelineConfig cfg;
        cfg.sweep_t_step = 0.002;
        return run_pipeline(cfg);
    }();
    return run;
}

std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mqspin_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("hexagon pipeline report") {
    const PipelineReport& r = hexagon_run().report;
    CHECK(r.n_spins == 6);
    CHECK(r.homq_excitable);
    CHECK(r.filter_order == 6);
    CHECK(r.f_homq == doctest::Approx(0.140398033659).epsilon(1e-9));
    CHECK(r.f_convert == doctest::Approx(0.71972495).epsilon(1e-6));
    CHECK(r.f_overall == doctest::Approx(r.f_homq * r.f_convert).epsilon(1e-12));
    CHECK(r.f_overall >= 0.10);
    CHECK(r.f_overall <= 0.11);
    CHECK(r.t_star_interior);
    CHECK(r.t_star == doctest::Approx(0.973).epsilon(1e-3));
    CHECK(r.pseudopure_fidelity >= 0.9);
    CHECK(r.p_u_drift < 0.01 * r.deviation_scale);
    CHECK(std::abs(r.f_s) == doctest::Approx(3.7648502691896257).epsilon(1e-12));
    CHECK(r.peaks_final == 1);
    CHECK(r.dominant_peaks_pre_saturation == 2);
    CHECK(r.dominant_peaks_final == 1);
    CHECK(r.peaks_equilibrium == 72);

    // unitary stages keep purity, non-unitary stages never raise it
    CHECK(r.purity_excited == doctest::Approx(r.purity_initial).epsilon(1e-10));
    CHECK(r.purity_reversed == doctest::Approx(r.purity_filtered).epsilon(1e-10));
    CHECK(r.purity_filtered <= r.purity_excited);
    CHECK(r.purity_crushed <= r.purity_reversed + 1e-12);
    CHECK(r.purity_saturated <= r.purity_crushed + 1e-12);
}

TEST_CASE("pipeline stage intensities") {
    const PipelineRun& run = hexagon_run();
    REQUIRE(run.stage_intensities.size() >= 3);
    const RVector& initial = run.stage_intensities.front().second;
    CHECK(initial.size() == 7);
    CHECK(initial(0) > 0.0);
    CHECK(initial.tail(6).norm() == 0.0);
    for (const auto& [name, v] : run.stage_intensities) {
        CAPTURE(name);
        CHECK(v.minCoeff() >= 0.0);
    }
    CHECK(run.thermal_sweep.has("F6"));
    CHECK(run.homq_sweep.has("F0"));
    CHECK(run.warnings.empty());
}

TEST_CASE("two-spin pipeline converts completely") {
    PipelineConfig cfg;
    cfg.system.kind = SystemSource::Kind::file;
    const auto dir = scratch_dir("pair");
    cfg.system.coupling_file = dir / "pair.txt";
    std::ofstream(cfg.system.coupling_file) << "2\n0 1\n1 0\n";
    cfg.frequency_unit = FrequencyUnit::angular;
    cfg.t_prep = std::numbers::pi / 2.0;
    cfg.sweep_t_max = 3.0;
    cfg.sweep_t_step = 0.01;
    const PipelineRun run = run_pipeline(cfg);
    CHECK(run.report.n_spins == 2);
    CHECK(run.report.f_homq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.report.f_convert == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(run.report.t_star == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-4));

    cfg.frequency_unit = FrequencyUnit::cyclic;
    cfg.t_prep = 0.25;
    CHECK(run_pipeline(cfg).report.f_homq == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("non-excitable size warns but runs") {
    PipelineConfig cfg;
    cfg.system.kind = SystemSource::Kind::file;
    const auto dir = scratch_dir("square");
    cfg.system.coupling_file = dir / "square.txt";
    std::ofstream(cfg.system.coupling_file)
        << "4\n0 1 0.35 1\n1 0 1 0.35\n0.35 1 0 1\n1 0.35 1 0\n";
    cfg.sweep_t_step = 0.01;
    const PipelineRun run = run_pipeline(cfg);
    CHECK_FALSE(run.report.homq_excitable);
    CHECK(run.report.f_homq < 1e-20);
    CHECK_FALSE(run.warnings.empty());
}

TEST_CASE("locating maxima") {
    const std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
    SweepTable rising(t, {"y"}, RMatrix(RVector::LinSpaced(5, 0.0, 4.0)));
    const MaximumEstimate e = locate_maximum(rising, "y");
    CHECK_FALSE(e.interior);
    CHECK(e.t == 4.0);

    RMatrix parabola(5, 1);
    for (int i = 0; i < 5; ++i) parabola(i, 0) = 1.0 - (t[i] - 1.7) * (t[i] - 1.7);
    const MaximumEstimate p = locate_maximum(SweepTable(t, {"y"}, parabola), "y");
    CHECK(p.interior);
    CHECK(p.t == doctest::Approx(1.7).epsilon(1e-12));
    CHECK(p.value == doctest::Approx(1.0).epsilon(1e-12));

    const auto& sweep = hexagon_run().thermal_sweep;
    const auto maxima = local_maxima(sweep, "F6", 0.5 * locate_maximum(sweep, "F6").value);
    REQUIRE(maxima.size() >= 1);
    for (const auto& m : maxima) CHECK(m.interior);
    CHECK_THROWS_AS(locate_maximum(sweep, "F9"), ValidationError);
}

TEST_CASE("pseudopure fidelity") {
    RVector p = RVector::Zero(4);
    p(3) = 1.0;
    CHECK(pseudopure_fidelity(p, 3) == doctest::Approx(1.0));
    CHECK(pseudopure_fidelity(p, 0) < 0.0);
    CHECK(pseudopure_fidelity(RVector::Constant(4, 0.25), 0) == 0.0);
}

TEST_CASE("config from JSON") {
    const json j = {{"system", "hexagon"},        {"d12", 2.0},
                    {"t_prep", 0.5},              {"frequency_unit", "angular"},
                    {"saturation_mode", "timed"}, {"saturation_duration", 3.0},
                    {"filter_order", 6}};
    const PipelineConfig cfg = config_from_json(j);
    CHECK(cfg.system.d12 == 2.0);
    CHECK(cfg.t_prep == 0.5);
    CHECK(cfg.frequency_unit == FrequencyUnit::angular);
    CHECK(cfg.saturation.mode == SaturationMode::timed);
    CHECK(cfg.saturation.duration == 3.0);
    REQUIRE(cfg.filter_order.has_value());
    CHECK(*cfg.filter_order == 6);

    CHECK_THROWS_AS(config_from_json(json{{"t_prp", 1.0}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"t_prep", -1.0}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"t_prep", "soon"}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"system", "file"}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json::array()), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"frequency_unit", "rpm"}}), ValidationError);
    CHECK_THROWS_AS(config_from_json(json{{"filter_order", 0}}), ValidationError);
    // the upper bound depends on the cluster, so it is checked when the run starts
    PipelineConfig too_high = config_from_json(json{{"filter_order", 9}});
    CHECK_THROWS_AS(run_pipeline(too_high), ValidationError);

    const auto dir = scratch_dir("config");
    std::ofstream(dir / "ring.txt") << "2\n0 1\n1 0\n";
    std::ofstream(dir / "run.json") << R"({"system": "file", "coupling_file": "ring.txt"})";
    const PipelineConfig from_file = read_config(dir / "run.json");
    CHECK(from_file.system.coupling_file == dir / "ring.txt");
    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS_AS(read_config(dir / "bad.json"), ValidationError);
    CHECK_THROWS_AS(read_config(dir / "missing.json"), ValidationError);
}

TEST_CASE("report JSON and written outputs") {
    const PipelineRun& run = hexagon_run();
    const json j = to_json(run.report);
    for (const char* key : {"n_spins", "f_homq", "f_convert", "f_overall", "t_star", "p_u_drift",
                            "pseudopure_fidelity", "f_s", "peaks_final", "frequency_unit"}) {
        CAPTURE(key);
        CHECK(j.contains(key));
    }
    CHECK(j["f_overall"].get<double>() == run.report.f_overall);

    const auto dir = scratch_dir("outputs");
    write_outputs(run, dir);
    for (const char* file : {"report.json", "sweep_thermal.csv", "sweep_homq.csv", "transitions.csv",
                             "populations.csv", "final_populations.txt", "mq_stages.csv",
                             "spectrum_equilibrium.csv", "spectrum_pre_saturation.csv",
                             "spectrum_final.csv"}) {
        CAPTURE(file);
        CHECK(std::filesystem::file_size(dir / file) > 0);
    }
    std::ifstream in(dir / "report.json");
    CHECK(json::parse(in) == j);
}
