#include "havoq/cli.hpp"

#include "havoq/errors.hpp"
#include "havoq/experiment.hpp"
#include "havoq/io.hpp"
#include "havoq/repro.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

namespace havoq {

namespace {

void print_report(const ResultRecord& rec) {
    std::printf("system=%s r=%d n_linear=%d n_forcing=%d\n",
                to_string(rec.config.system).c_str(), rec.r_used,
                rec.model.n_linear(), rec.model.n_forcing());
    for (const auto& [name, value] : rec.report.retrieved) {
        const auto t = rec.report.truth.find(name);
        const auto e = rec.report.percent_errors.find(name);
        if (t != rec.report.truth.end() && e != rec.report.percent_errors.end()) {
            std::printf("  %-16s %.10g  (truth %.10g, err %.4g%%)\n",
                        name.c_str(), value, t->second, e->second);
        } else {
            std::printf("  %-16s %.10g\n", name.c_str(), value);
        }
    }
    for (const auto& flag : rec.report.flags) {
        std::printf("  flag: %s\n", flag.c_str());
    }
}

int cmd_simulate(const std::string& config_path, const std::string& out) {
    ExperimentConfig cfg = load_config(config_path);
    const auto [series, invariants] = simulate_channels(cfg);
    std::filesystem::create_directories(out);
    io::write_series_csv(out + "/series.csv", series);
    io::write_series_json(out + "/series.json", series);
    std::printf("wrote %s/series.csv (%d samples, %d channels); "
                "max trace err %.3g, substeps %d\n",
                out.c_str(), series.samples(), series.channels(),
                invariants.max_trace_error, invariants.substeps_used);
    return 0;
}

int cmd_fit(const std::string& csv_path, const std::string& out, int m, double tau,
            const std::string& r_arg, int r_max) {
    const MultichannelSeries series = io::read_series_csv(csv_path);
    std::filesystem::create_directories(out);

    int r = 0;
    if (r_arg != "auto") {
        r = std::stoi(r_arg);
        if (r < 1) {
            throw ConfigError("fit: r must be a positive integer or 'auto'");
        }
    }
    MhavokWorkspace ws(series, m, std::max(r, r_max));
    RankSweep sweep;
    if (r == 0) {
        sweep = select_optimal_rank(ws, tau, r_max);
        r = sweep.r_opt;
    }
    HavokModel model = ws.fit_model(r, tau);
    if (model.n_linear() == 0) {
        throw ClassificationError("fit: no linear modes at rank " + std::to_string(r));
    }
    const Reconstruction recon = ws.reconstruct_from(model);
    io::write_model_json(out + "/model.json", model, sweep.r_opt > 0 ? &sweep : nullptr);
    io::write_series_csv(out + "/recon.csv", recon.observables);

    const EigenSpectrum spec = eigen_spectrum(model.a, series.dt);
    std::printf("r=%d n_linear=%d n_forcing=%d\n", r, model.n_linear(), model.n_forcing());
    for (const auto& mode : spec.modes) {
        std::printf("  mode: decay %.8g  omega %.8g\n", mode.decay, mode.omega);
    }
    return 0;
}

int cmd_identify(const std::string& config_path, const std::string& out) {
    ExperimentConfig cfg = load_config(config_path);
    if (!out.empty()) {
        cfg.out_dir = out;
    }
    const ResultRecord rec = run_experiment(cfg);
    if (!rec.success) {
        std::fprintf(stderr, "identify failed (%s): %s\n", rec.error_type.c_str(),
                     rec.error.c_str());
        return 1;
    }
    print_report(rec);
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& sweep_path,
              const std::string& out, int threads) {
    ExperimentConfig base = load_config(config_path);
    if (!out.empty()) {
        base.out_dir = out;
    }
    const SweepSpec sweep = load_sweep(sweep_path);
    const std::vector<ResultRecord> records = run_sweep(base, sweep, threads);
    if (!base.out_dir.empty()) {
        std::filesystem::create_directories(base.out_dir);
        write_sweep_summary(base.out_dir + "/summary.csv", records, sweep);
    }
    int failures = 0;
    for (const auto& rec : records) {
        if (!rec.success) {
            ++failures;
            std::fprintf(stderr, "point failed (%s): %s\n", rec.error_type.c_str(),
                         rec.error.c_str());
        }
    }
    std::printf("sweep: %zu points, %d failed\n", records.size(), failures);
    return failures == 0 ? 0 : 1;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Hamiltonian-parameter identification for simulated open quantum systems "
                 "via multichannel HAVOK spectral analysis"};
    app.require_subcommand(1);

    std::string config_path, out_dir, csv_path, sweep_path, target;
    std::string r_arg = "auto";
    int m = 100, r_max = 30, threads = 1;
    double tau = 0.95;

    auto* sim = app.add_subcommand("simulate", "Integrate the Lindblad equation and emit the "
                                               "observable channels as CSV/JSON");
    sim->add_option("--config", config_path, "experiment config JSON")->required();
    sim->add_option("--out", out_dir, "output directory")->required();

    auto* fit = app.add_subcommand("fit", "Run the mHAVOK fit on a CSV of channels");
    fit->add_option("--csv", csv_path, "input CSV (t plus channels)")->required();
    fit->add_option("--out", out_dir, "output directory")->required();
    fit->add_option("--m", m, "embedding dimension");
    fit->add_option("--tau", tau, "linear/forcing threshold");
    fit->add_option("--r", r_arg, "cutoff rank or 'auto'");
    fit->add_option("--r-max", r_max, "rank sweep upper bound");

    auto* ident = app.add_subcommand("identify", "Full pipeline from a config file");
    ident->add_option("--config", config_path, "experiment config JSON")->required();
    ident->add_option("--out", out_dir, "output directory");

    auto* swp = app.add_subcommand("sweep", "Run a parameter sweep");
    swp->add_option("--config", config_path, "base config JSON")->required();
    swp->add_option("--sweep", sweep_path, "sweep spec JSON")->required();
    swp->add_option("--out", out_dir, "output directory");
    swp->add_option("--threads", threads, "concurrent sweep points");

    auto* rep = app.add_subcommand("reproduce", "Rebuild a canned figure/table data set");
    rep->add_option("target", target, "one of: fig2 fig3 fig4 fig5 fig6 fig7 fig8 table2")
        ->required();
    rep->add_option("--out", out_dir, "output directory")->required();
    rep->add_option("--threads", threads, "concurrent sweep points");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            return cmd_simulate(config_path, out_dir);
        }
        if (fit->parsed()) {
            return cmd_fit(csv_path, out_dir, m, tau, r_arg, r_max);
        }
        if (ident->parsed()) {
            return cmd_identify(config_path, out_dir);
        }
        if (swp->parsed()) {
            return cmd_sweep(config_path, sweep_path, out_dir, threads);
        }
        if (rep->parsed()) {
            return repro::reproduce(target, out_dir, threads);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}

} // namespace havoq
