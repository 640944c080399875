#include "havoq/experiment.hpp"

#include "havoq/baselines.hpp"
#include "havoq/errors.hpp"
#include "havoq/io.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <mutex>
#include <thread>

namespace havoq {

namespace {

using ordered_json = nlohmann::ordered_json;

struct PreparedSystem {
    HilbertSpec spec;
    LindbladModel model;
    DensityMatrix rho0;
    std::vector<ObservableSpec> observables;
    int fit_channels = 0;
};

PreparedSystem prepare_system(const ExperimentConfig& c) {
    PreparedSystem p;
    p.spec = c.hilbert();
    const OperatorSet ops = build_operators(p.spec);

    Operator h = build_qho_hamiltonian(c.omega_x, c.omega_y, p.spec, c.ordering);
    switch (c.system) {
        case SystemKind::qho:
            break;
        case SystemKind::kerr:
        case SystemKind::kerr_closed:
            h += build_kerr_hamiltonian(c.chi_x, c.chi_y, 0.0, p.spec, c.ordering);
            break;
        case SystemKind::cross_kerr:
            h += build_kerr_hamiltonian(c.chi_x, c.chi_y, c.chi_xy, p.spec, c.ordering);
            break;
        case SystemKind::jaynes_cummings:
            h += build_jc_hamiltonian(c.omega_q, c.g, p.spec);
            break;
        case SystemKind::modulated:
            break;
    }
    p.model.hamiltonian = h;
    if (c.system == SystemKind::modulated) {
        p.model.drive = build_modulation_drive(c.delta, c.omega_f, p.spec);
    }

    BathSpec bath;
    bath.temperature = c.temperature;
    bath.kappa = c.kappa;
    bath.phi = c.phi;
    bath.common_environment = c.common_environment;
    std::optional<QubitRates> rates;
    if (c.system == SystemKind::jaynes_cummings) {
        rates = QubitRates{c.gamma, c.gamma_phi};
    }
    p.model.jumps = build_jump_operators(bath, c.omega_x, c.omega_y, ops, rates);

    p.rho0 = coherent_state(complexd(c.alpha_re, c.alpha_im), p.spec, false);

    if (c.system == SystemKind::jaynes_cummings) {
        p.observables = {
            {"x", ops.quad_x(), ObservableSpec::Part::real},
            {"px", ops.mom_x(), ObservableSpec::Part::real},
            {"y", ops.quad_y(), ObservableSpec::Part::real},
            {"py", ops.mom_y(), ObservableSpec::Part::real},
            {"sp_re", ops.sp, ObservableSpec::Part::real},
            {"sp_im", ops.sp, ObservableSpec::Part::imag},
        };
        p.fit_channels = 6;
    } else {
        p.observables = {
            {"x", ops.quad_x(), ObservableSpec::Part::real},
            {"y", ops.quad_y(), ObservableSpec::Part::real},
            {"px", ops.mom_x(), ObservableSpec::Part::real},
            {"py", ops.mom_y(), ObservableSpec::Part::real},
        };
        p.fit_channels = 4;
        if (c.system == SystemKind::cross_kerr) {
            p.observables.push_back({"n_x", ops.number_x(c.ordering), ObservableSpec::Part::real});
            p.observables.push_back({"n_y", ops.number_y(c.ordering), ObservableSpec::Part::real});
        }
    }
    return p;
}

MultichannelSeries slice_channels(const MultichannelSeries& s, int count) {
    MultichannelSeries out;
    out.t0 = s.t0;
    out.dt = s.dt;
    out.names.assign(s.names.begin(), s.names.begin() + count);
    out.values = s.values.leftCols(count);
    return out;
}

ParameterReport run_retrieval(const ExperimentConfig& c, const EigenSpectrum& spec,
                              const MultichannelSeries& series) {
    switch (c.system) {
        case SystemKind::qho:
            return retrieve_qho_params(spec);
        case SystemKind::kerr:
        case SystemKind::kerr_closed:
            return retrieve_kerr_ladder(spec);
        case SystemKind::cross_kerr: {
            CrossKerrInputs in;
            in.omega_x = c.omega_x;
            in.omega_y = c.omega_y;
            in.n_x_ss = tail_mean(series.channel("n_x"), c.tail_fraction);
            in.n_y_ss = tail_mean(series.channel("n_y"), c.tail_fraction);
            return retrieve_cross_kerr(spec, in);
        }
        case SystemKind::jaynes_cummings:
            return retrieve_jc_coupling(spec, c.omega_q, c.omega_x);
        case SystemKind::modulated:
            return retrieve_modulation_frequency(spec, c.omega_x, c.omega_y);
    }
    throw ConfigError("run_retrieval: unknown system");
}

double mean_omega_error(const ParameterReport& report) {
    double sum = 0.0;
    int n = 0;
    for (const auto& [name, err] : report.percent_errors) {
        if (name == "omega_x" || name == "omega_y") {
            sum += err;
            ++n;
        }
    }
    return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

BaselineErrors run_baselines(const ExperimentConfig& c, const MultichannelSeries& fit_series) {
    BaselineErrors out;
    out.ran = true;
    const std::vector<double> targets{c.omega_x, c.omega_y};
    const std::vector<std::string> channels{"x", "y"};

    if (c.baselines.fft) {
        double sum = 0.0;
        for (size_t i = 0; i < targets.size(); ++i) {
            const FftPeaks peaks = fft_peak_frequencies(fit_series.channel(channels[i]),
                                                        fit_series.dt, 1);
            const double est = peaks.omegas.empty()
                ? std::numeric_limits<double>::quiet_NaN() : peaks.omegas.front();
            out.fft_omegas.push_back(est);
            sum += percent_error(targets[i], est);
        }
        out.fft_mean_omega_err = sum / targets.size();
    }

    if (c.baselines.pencil) {
        const int n = fit_series.samples();
        const int l = c.baselines.pencil_l > 0 ? c.baselines.pencil_l : n / 3;
        Eigen::MatrixXd quad(fit_series.values.rows(), 4);
        quad.col(0) = fit_series.channel("x");
        quad.col(1) = fit_series.channel("y");
        quad.col(2) = fit_series.channel("px");
        quad.col(3) = fit_series.channel("py");
        const PoleEstimate poles = matrix_pencil(quad, fit_series.dt, l, c.baselines.pencil_p);
        double sum = 0.0;
        for (const double target : targets) {
            double best = std::numeric_limits<double>::quiet_NaN();
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& s : poles.poles) {
                const double w = std::abs(s.imag());
                if (std::abs(w - target) < dist) {
                    dist = std::abs(w - target);
                    best = w;
                }
            }
            out.pencil_omegas.push_back(best);
            sum += percent_error(target, best);
        }
        out.pencil_mean_omega_err = sum / targets.size();
    }
    return out;
}

std::string exception_tag(const std::exception& e) {
    if (dynamic_cast<const UnresolvedSidebandsError*>(&e)) return "unresolved_sidebands";
    if (dynamic_cast<const LadderAmbiguityError*>(&e)) return "ladder_ambiguity";
    if (dynamic_cast<const TruncationError*>(&e)) return "truncation";
    if (dynamic_cast<const IntegrationDivergedError*>(&e)) return "integration_diverged";
    if (dynamic_cast<const ClassificationError*>(&e)) return "classification";
    if (dynamic_cast<const ConfigError*>(&e)) return "config";
    return "error";
}

class StageTimer {
public:
    explicit StageTimer(std::vector<std::pair<std::string, double>>& sink) : sink_(sink) {}

    template <typename Fn>
    auto run(const std::string& stage, Fn&& fn) {
        const auto start = std::chrono::steady_clock::now();
        if constexpr (std::is_void_v<decltype(fn())>) {
            fn();
            record(stage, start);
        } else {
            auto out = fn();
            record(stage, start);
            return out;
        }
    }

private:
    void record(const std::string& stage,
                std::chrono::steady_clock::time_point start) {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
        sink_.emplace_back(stage, dt.count());
    }

    std::vector<std::pair<std::string, double>>& sink_;
};

} // namespace

std::map<std::string, double> truth_parameters(const ExperimentConfig& c) {
    std::map<std::string, double> t;
    switch (c.system) {
        case SystemKind::qho:
            t = {{"omega_x", c.omega_x}, {"omega_y", c.omega_y}, {"kappa", c.kappa}};
            break;
        case SystemKind::kerr:
        case SystemKind::kerr_closed:
            t = {{"omega_x", c.omega_x}, {"omega_y", c.omega_y},
                 {"chi_x", c.chi_x}, {"chi_y", c.chi_y}};
            break;
        case SystemKind::cross_kerr:
            t = {{"chi_xy", c.chi_xy}};
            break;
        case SystemKind::jaynes_cummings:
            t = {{"g", c.g}};
            break;
        case SystemKind::modulated:
            t = {{"omega_f", c.omega_f}, {"omega_x", c.omega_x}};
            break;
    }
    return t;
}

std::pair<MultichannelSeries, InvariantReport> simulate_channels(const ExperimentConfig& config) {
    config.validate();
    const PreparedSystem sys = prepare_system(config);
    EvolveOptions opts;
    opts.layout = sys.spec;
    const ObservedEvolution evo = evolve_observed(sys.model, sys.rho0, config.grid.t_f,
                                                  config.grid.dt, sys.observables, opts);
    return {evo.series, evo.invariants};
}

ResultRecord run_experiment(const ExperimentConfig& config) {
    config.validate();
    ResultRecord rec;
    rec.config = config;
    StageTimer timer(rec.timings_s);

    try {
        const PreparedSystem sys = timer.run("build", [&] { return prepare_system(config); });

        EvolveOptions evolve_opts;
        evolve_opts.layout = sys.spec;
        const ObservedEvolution evo = timer.run("simulate", [&] {
            return evolve_observed(sys.model, sys.rho0, config.grid.t_f, config.grid.dt,
                                   sys.observables, evolve_opts);
        });
        rec.series = evo.series;
        rec.invariants = evo.invariants;
        rec.fit_channels = sys.fit_channels;
        const MultichannelSeries fit_series = slice_channels(evo.series, sys.fit_channels);

        const MhavokWorkspace ws = timer.run("embed_svd", [&] {
            const int cap = std::max(config.mhavok.r, config.mhavok.r_max);
            return MhavokWorkspace(fit_series, config.mhavok.m, cap);
        });

        rec.rank_auto = config.mhavok.r == 0;
        if (rec.rank_auto) {
            rec.rank_sweep = timer.run("rank_select", [&] {
                return select_optimal_rank(ws, config.mhavok.tau, config.mhavok.r_max);
            });
            rec.r_used = rec.rank_sweep.r_opt;
        } else {
            rec.r_used = config.mhavok.r;
        }

        timer.run("fit", [&] {
            rec.model = ws.fit_model(rec.r_used, config.mhavok.tau);
            if (rec.model.n_linear() == 0) {
                throw ClassificationError("fit: no linear modes at rank " +
                                          std::to_string(rec.r_used));
            }
            rec.recon = ws.reconstruct_from(rec.model);
        });
        const int cols = rec.recon.observables.samples();
        rec.signal_rms = std::sqrt(fit_series.values.topRows(cols).squaredNorm() /
                                   (static_cast<double>(cols) * sys.fit_channels));
        rec.recon_rms = std::sqrt(
            (rec.recon.observables.values - fit_series.values.topRows(cols)).squaredNorm() /
            (static_cast<double>(cols) * sys.fit_channels));

        timer.run("spectral", [&] {
            rec.spectrum = eigen_spectrum(rec.model.a, config.grid.dt);
            rec.report = run_retrieval(config, rec.spectrum, evo.series);
            finalize_report(rec.report, truth_parameters(config));
        });
        rec.mhavok_mean_omega_err = mean_omega_error(rec.report);

        if (config.baselines.fft || config.baselines.pencil) {
            rec.baselines = timer.run("baselines", [&] {
                return run_baselines(config, fit_series);
            });
        }
        rec.success = true;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        rec.success = false;
        rec.error = e.what();
        rec.error_type = exception_tag(e);
    }

    if (!config.out_dir.empty()) {
        persist_record(rec, config.out_dir);
    }
    return rec;
}

std::vector<ResultRecord> run_sweep(const ExperimentConfig& base, const SweepSpec& sweep,
                                    int threads) {
    if (sweep.size() == 0) {
        throw ConfigError("run_sweep: empty sweep");
    }
    const size_t n = sweep.size();
    std::vector<ResultRecord> records(n);
    std::vector<ExperimentConfig> configs;
    configs.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        ExperimentConfig c = apply_sweep_point(base, sweep, i);
        if (!base.out_dir.empty()) {
            c.out_dir = base.out_dir + "/point_" + std::to_string(i);
        }
        configs.push_back(std::move(c));
    }

    threads = std::max(1, threads);
    std::mutex next_mutex;
    size_t next = 0;
    auto worker = [&]() {
        for (;;) {
            size_t i;
            {
                std::lock_guard<std::mutex> lock(next_mutex);
                if (next >= n) {
                    return;
                }
                i = next++;
            }
            try {
                records[i] = run_experiment(configs[i]);
            } catch (const std::exception& e) {
                records[i].config = configs[i];
                records[i].success = false;
                records[i].error = e.what();
                records[i].error_type = exception_tag(e);
            }
        }
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return records;
}

void persist_record(const ResultRecord& rec, const std::string& dir) {
    std::filesystem::create_directories(dir);
    io::write_text(dir + "/config.json", serialize_config(rec.config) + "\n");
    if (rec.series.samples() > 0) {
        io::write_series_csv(dir + "/series.csv", rec.series);
        io::write_series_json(dir + "/series.json", rec.series);
    }
    if (rec.success) {
        io::write_series_csv(dir + "/recon.csv", rec.recon.observables);
        io::write_model_json(dir + "/model.json", rec.model,
                             rec.rank_auto ? &rec.rank_sweep : nullptr);
        io::write_report_json(dir + "/report.json", rec.report);
    }

    ordered_json j;
    j["success"] = rec.success;
    j["error"] = rec.error;
    j["error_type"] = rec.error_type;
    j["r_used"] = rec.r_used;
    j["rank_auto"] = rec.rank_auto;
    j["n_linear"] = rec.model.n_linear();
    j["n_forcing"] = rec.model.n_forcing();
    j["recon_rms"] = rec.recon_rms;
    j["signal_rms"] = rec.signal_rms;
    j["mhavok_mean_omega_err"] = rec.mhavok_mean_omega_err;
    if (rec.baselines.ran) {
        j["fft_mean_omega_err"] = rec.baselines.fft_mean_omega_err;
        j["pencil_mean_omega_err"] = rec.baselines.pencil_mean_omega_err;
    }
    ordered_json inv;
    inv["max_trace_error"] = rec.invariants.max_trace_error;
    inv["max_hermiticity_error"] = rec.invariants.max_hermiticity_error;
    inv["min_eigenvalue"] = rec.invariants.min_eigenvalue;
    inv["max_top_level_population"] = rec.invariants.max_top_level_population;
    inv["substeps_used"] = rec.invariants.substeps_used;
    j["invariants"] = inv;
    ordered_json timings = ordered_json::object();
    for (const auto& [stage, sec] : rec.timings_s) {
        timings[stage] = sec;
    }
    j["timings_s"] = timings;
    io::write_text(dir + "/record.json", j.dump(2) + "\n");
}

void write_sweep_summary(const std::string& path, const std::vector<ResultRecord>& records,
                         const SweepSpec& sweep) {
    if (records.empty()) {
        throw ConfigError("write_sweep_summary: no records");
    }
    // Columns: point index, swept value (when a single parameter), success,
    // then the union of report keys, then baseline errors.
    std::vector<std::string> keys;
    for (const auto& r : records) {
        for (const auto& [k, v] : r.report.percent_errors) {
            (void)v;
            if (std::find(keys.begin(), keys.end(), k) == keys.end()) {
                keys.push_back(k);
            }
        }
    }
    std::sort(keys.begin(), keys.end());

    std::vector<std::string> header{"index"};
    const bool single_param = !sweep.parameter.empty();
    if (single_param) {
        auto dot = sweep.parameter.find('.');
        header.push_back(dot == std::string::npos ? sweep.parameter
                                                  : sweep.parameter.substr(dot + 1));
    }
    header.push_back("success");
    for (const auto& k : keys) {
        header.push_back("ret_" + k);
        header.push_back("err_" + k);
    }
    header.push_back("err_mhavok_omega");
    header.push_back("err_fft");
    header.push_back("err_pencil");

    const double nan = std::numeric_limits<double>::quiet_NaN();
    Eigen::MatrixXd rows(records.size(), header.size());
    for (size_t i = 0; i < records.size(); ++i) {
        int col = 0;
        rows(i, col++) = static_cast<double>(i);
        if (single_param) {
            rows(i, col++) = sweep.values.empty() ? nan : sweep.values[i];
        }
        rows(i, col++) = records[i].success ? 1.0 : 0.0;
        for (const auto& k : keys) {
            const auto& rep = records[i].report;
            const auto rit = rep.retrieved.find(k);
            const auto eit = rep.percent_errors.find(k);
            rows(i, col++) = rit != rep.retrieved.end() ? rit->second : nan;
            rows(i, col++) = eit != rep.percent_errors.end() ? eit->second : nan;
        }
        rows(i, col++) = records[i].mhavok_mean_omega_err;
        rows(i, col++) = records[i].baselines.fft_mean_omega_err;
        rows(i, col++) = records[i].baselines.pencil_mean_omega_err;
    }
    io::write_csv(path, header, rows);
}

} // namespace havoq
