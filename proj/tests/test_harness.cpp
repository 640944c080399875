#include "havoq/cli.hpp"
#include "havoq/errors.hpp"
#include "havoq/experiment.hpp"
#include "havoq/io.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

using namespace havoq;
using std::numbers::pi;

namespace {

std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("havoq_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    REQUIRE(f.good());
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

} // namespace

TEST_CASE("config defaults match the reference simulation parameters") {
    const ExperimentConfig c = parse_config(R"({"system": "qho"})");
    CHECK(c.omega_x == doctest::Approx(2.0 * pi));
    CHECK(c.omega_y == doctest::Approx(pi));
    CHECK(c.temperature == doctest::Approx(2.0));
    CHECK(c.kappa == doctest::Approx(0.1));
    CHECK(c.n_x == 10);
    CHECK(c.n_y == 10);
    CHECK(c.grid.t_f == doctest::Approx(50.0));
    CHECK(c.grid.dt == doctest::Approx(0.01));
    CHECK(c.mhavok.m == 100);
    CHECK(c.mhavok.tau == doctest::Approx(0.95));
    CHECK(c.mhavok.r == 0);  // auto
    CHECK(c.mhavok.r_max == 30);
    CHECK_FALSE(c.common_environment);
    CHECK(c.ordering == NumberOrdering::annihilation_first);
}

TEST_CASE("config round trip is the identity") {
    ExperimentConfig c = parse_config(R"({
        "system": "kerr",
        "physics": {"chi_x": 2.0, "chi_y": 3.0, "kappa": 0.25},
        "mhavok": {"r": 20},
        "out_dir": "somewhere"
    })");
    const std::string first = serialize_config(c);
    const ExperimentConfig reparsed = parse_config(first);
    CHECK(serialize_config(reparsed) == first);
    CHECK(reparsed.chi_x == doctest::Approx(2.0));
    CHECK(reparsed.mhavok.r == 20);
    CHECK(reparsed.out_dir == "somewhere");
}

TEST_CASE("config validation errors") {
    // system-specific parameters must be explicit
    CHECK_THROWS_AS(parse_config(R"({"system": "modulated", "physics": {"delta": 4.0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"system": "kerr", "physics": {"chi_x": 2.0}})"),
                    ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"system": "jaynes_cummings"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"system": "nonsense"})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"physics": {}})"), ConfigError);
    CHECK_THROWS_AS(parse_config("not json"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"system": "qho", "mhavok": {"tau": 1.5}})"), ConfigError);
    CHECK_THROWS_AS(parse_config(R"({"system": "qho", "physics": {"kappa": -1.0}})"),
                    ConfigError);
    // modulated accepts explicit values
    const ExperimentConfig ok = parse_config(
        R"({"system": "modulated", "physics": {"delta": 4.0, "omega_f": 1.1557}})");
    CHECK(ok.delta == doctest::Approx(4.0));
}

TEST_CASE("sweep parsing and application") {
    SUBCASE("value list") {
        const SweepSpec s = parse_sweep(R"({"parameter": "physics.kappa",
                                            "values": [0.1, 0.2, 0.3]})");
        CHECK(s.size() == 3);
        const ExperimentConfig base = parse_config(R"({"system": "qho"})");
        const ExperimentConfig point = apply_sweep_point(base, s, 2);
        CHECK(point.kappa == doctest::Approx(0.3));
    }
    SUBCASE("linspace form") {
        const SweepSpec s = parse_sweep(R"({"parameter": "physics.kappa",
                                            "values": {"start": 0.1, "stop": 1.5, "count": 15}})");
        REQUIRE(s.size() == 15);
        CHECK(s.values.front() == doctest::Approx(0.1));
        CHECK(s.values.back() == doctest::Approx(1.5));
    }
    SUBCASE("explicit points with dotted keys") {
        const SweepSpec s = parse_sweep(
            R"({"points": [{"physics.chi_xy": 0.05}, {"physics.chi_xy": 0.10}]})");
        CHECK(s.size() == 2);
        const ExperimentConfig base = parse_config(
            R"({"system": "cross_kerr", "physics": {"chi_xy": 0.0}})");
        CHECK(apply_sweep_point(base, s, 1).chi_xy == doctest::Approx(0.10));
    }
    SUBCASE("empty sweep is rejected") {
        CHECK_THROWS_AS(parse_sweep(R"({"parameter": "physics.kappa", "values": []})"),
                        ConfigError);
    }
}

TEST_CASE("series CSV round trip with full precision") {
    const std::string dir = temp_dir("csv");
    MultichannelSeries s;
    s.dt = 0.01;
    s.names = {"x", "y"};
    s.values.resize(4, 2);
    s.values << 0.1, -0.2,
                1.0 / 3.0, pi,
                std::sqrt(2.0), -1e-17,
                4.0, 5.0;
    io::write_series_csv(dir + "/s.csv", s);
    const MultichannelSeries r = io::read_series_csv(dir + "/s.csv");
    CHECK(r.names == s.names);
    CHECK(r.dt == doctest::Approx(0.01));
    CHECK((r.values - s.values).cwiseAbs().maxCoeff() == 0.0);  // %.17g is lossless

    // identical rewrite is byte-identical
    io::write_series_csv(dir + "/s2.csv", s);
    CHECK(slurp(dir + "/s.csv") == slurp(dir + "/s2.csv"));

    const std::string header = slurp(dir + "/s.csv").substr(0, 6);
    CHECK(header == "t,x,y\n");
}

TEST_CASE("run_experiment end to end on a short window") {
    ExperimentConfig c = parse_config(R"({
        "system": "qho",
        "grid": {"t_f": 6.0, "dt": 0.01},
        "mhavok": {"m": 60, "r": 4},
        "baselines": {"fft": true, "pencil": true, "pencil_p": 4}
    })");
    const ResultRecord rec = run_experiment(c);
    REQUIRE(rec.success);
    CHECK(rec.r_used == 4);
    CHECK(rec.model.n_linear() == 4);
    CHECK(rec.report.percent_errors.at("omega_x") < 1.0);
    CHECK(rec.report.percent_errors.at("omega_y") < 1.0);
    CHECK(rec.report.percent_errors.at("kappa") < 2.0);
    CHECK(std::isfinite(rec.baselines.fft_mean_omega_err));
    CHECK(std::isfinite(rec.baselines.pencil_mean_omega_err));
    CHECK(rec.recon_rms < 0.05 * rec.signal_rms);
    CHECK_FALSE(rec.timings_s.empty());
}

TEST_CASE("run_experiment persists the record files") {
    const std::string dir = temp_dir("record");
    ExperimentConfig c = parse_config(R"({
        "system": "qho",
        "grid": {"t_f": 4.0, "dt": 0.01},
        "mhavok": {"m": 40, "r": 4},
        "baselines": {"fft": false, "pencil": false}
    })");
    c.out_dir = dir;
    const ResultRecord rec = run_experiment(c);
    REQUIRE(rec.success);
    for (const char* name : {"config.json", "series.csv", "series.json", "recon.csv",
                             "model.json", "report.json", "record.json"}) {
        CHECK(std::filesystem::exists(dir + "/" + std::string(name)));
    }
    // config snapshot reparses to the same run
    const ExperimentConfig snap = load_config(dir + "/config.json");
    CHECK(snap.grid.t_f == doctest::Approx(4.0));
}

TEST_CASE("run_sweep records failures and continues") {
    ExperimentConfig base = parse_config(R"({
        "system": "qho",
        "grid": {"t_f": 4.0, "dt": 0.01},
        "mhavok": {"m": 40, "r": 4},
        "baselines": {"fft": false, "pencil": false}
    })");
    SweepSpec sweep;
    sweep.parameter = "grid.t_f";
    sweep.values = {4.0, 0.2};  // the second point is shorter than the window
    const std::vector<ResultRecord> recs = run_sweep(base, sweep, 2);
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].success);
    CHECK_FALSE(recs[1].success);
    CHECK_FALSE(recs[1].error.empty());

    const std::string dir = temp_dir("sweep");
    write_sweep_summary(dir + "/summary.csv", recs, sweep);
    const std::string text = slurp(dir + "/summary.csv");
    CHECK(text.find("t_f") != std::string::npos);
    CHECK(text.find("err_mhavok_omega") != std::string::npos);
}

TEST_CASE("cli exit codes") {
    SUBCASE("unknown subcommand is a usage error") {
        CHECK(run_cli({"frobnicate"}) == 2);
    }
    SUBCASE("missing arguments are usage errors") {
        CHECK(run_cli({}) == 2);
        CHECK(run_cli({"identify"}) == 2);
    }
    SUBCASE("bad config file is a config error") {
        CHECK(run_cli({"identify", "--config", "/nonexistent.json"}) == 2);
    }
    SUBCASE("unknown reproduce target is a config error") {
        const std::string dir = temp_dir("cli");
        CHECK(run_cli({"reproduce", "fig99", "--out", dir}) == 2);
    }
    SUBCASE("simulate writes a trajectory") {
        const std::string dir = temp_dir("cli_sim");
        io::write_text(dir + "/c.json", R"({
            "system": "qho",
            "grid": {"t_f": 1.0, "dt": 0.01}
        })");
        CHECK(run_cli({"simulate", "--config", dir + "/c.json", "--out", dir}) == 0);
        CHECK(std::filesystem::exists(dir + "/series.csv"));
        CHECK(std::filesystem::exists(dir + "/series.json"));
    }
    SUBCASE("fit consumes a trajectory CSV") {
        const std::string dir = temp_dir("cli_fit");
        MultichannelSeries s;
        s.dt = 0.01;
        s.names = {"x", "p"};
        const int n = 1200;
        s.values.resize(n, 2);
        for (int k = 0; k < n; ++k) {
            const double t = 0.01 * k;
            s.values(k, 0) = std::exp(-0.05 * t) * std::cos(2.0 * pi * t);
            s.values(k, 1) = -std::exp(-0.05 * t) * std::sin(2.0 * pi * t);
        }
        io::write_series_csv(dir + "/chan.csv", s);
        CHECK(run_cli({"fit", "--csv", dir + "/chan.csv", "--out", dir,
                       "--m", "40", "--r", "2"}) == 0);
        CHECK(std::filesystem::exists(dir + "/model.json"));
        CHECK(std::filesystem::exists(dir + "/recon.csv"));
    }
}
