#include "havoq/repro.hpp"

#include "havoq/errors.hpp"
#include "havoq/experiment.hpp"
#include "havoq/io.hpp"

#include <cmath>
#include <filesystem>
#include <numbers>

namespace havoq::repro {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

} // namespace

ExperimentConfig qho(double kappa) {
    ExperimentConfig c;
    c.system = SystemKind::qho;
    c.kappa = kappa;
    return c;
}

ExperimentConfig kerr(double chi_x, double chi_y, bool closed) {
    ExperimentConfig c;
    c.system = closed ? SystemKind::kerr_closed : SystemKind::kerr;
    c.chi_x = chi_x;
    c.chi_y = chi_y;
    if (closed) {
        c.kappa = 0.0;
    }
    return c;
}

ExperimentConfig cross_kerr(double chi_xy) {
    ExperimentConfig c;
    c.system = SystemKind::cross_kerr;
    c.chi_xy = chi_xy;
    return c;
}

ExperimentConfig jaynes_cummings(double g, double omega_q) {
    ExperimentConfig c;
    c.system = SystemKind::jaynes_cummings;
    c.g = g;
    c.omega_q = omega_q;
    return c;
}

ExperimentConfig modulated(double delta, double omega_f) {
    ExperimentConfig c;
    c.system = SystemKind::modulated;
    c.delta = delta;
    c.omega_f = omega_f;
    return c;
}

std::vector<std::string> targets() {
    return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "table2"};
}

namespace {

double err_of(const ResultRecord& r, const std::string& key) {
    const auto it = r.report.percent_errors.find(key);
    return it != r.report.percent_errors.end() ? it->second
                                               : std::numeric_limits<double>::quiet_NaN();
}

int reproduce_fig2(const std::string& dir, int) {
    int rc = 0;
    for (const double kappa : {0.1, 1.0}) {
        ExperimentConfig c = qho(kappa);
        c.out_dir = dir + "/qho_kappa_" + fmt(kappa);
        const ResultRecord rec = run_experiment(c);
        if (!rec.success) {
            rc = 1;
        }
    }
    return rc;
}

int reproduce_fig3(const std::string& dir, int threads) {
    ExperimentConfig base = qho(0.1);
    base.out_dir = dir;
    SweepSpec sweep;
    sweep.parameter = "physics.kappa";
    for (int i = 1; i <= 15; ++i) {
        sweep.values.push_back(0.1 * i);
    }
    const std::vector<ResultRecord> records = run_sweep(base, sweep, threads);

    Eigen::MatrixXd rows(records.size(), 4);
    int rc = 0;
    for (size_t i = 0; i < records.size(); ++i) {
        rows(i, 0) = sweep.values[i];
        rows(i, 1) = records[i].mhavok_mean_omega_err;
        rows(i, 2) = records[i].baselines.fft_mean_omega_err;
        rows(i, 3) = records[i].baselines.pencil_mean_omega_err;
        if (!records[i].success) {
            rc = 1;
        }
    }
    io::write_csv(dir + "/fig3.csv", {"kappa", "err_mhavok", "err_fft", "err_pencil"}, rows);
    return rc;
}

int reproduce_fig4(const std::string& dir, int) {
    const std::vector<std::pair<double, double>> cases{{2.0, 3.0}, {5.0, 5.0}};
    Eigen::MatrixXd rows(cases.size(), 9);
    int rc = 0;
    for (size_t i = 0; i < cases.size(); ++i) {
        ExperimentConfig c = kerr(cases[i].first, cases[i].second);
        c.out_dir = dir + "/kerr_" + fmt(cases[i].first) + "_" + fmt(cases[i].second);
        const ResultRecord rec = run_experiment(c);
        rows(i, 0) = cases[i].first;
        rows(i, 1) = cases[i].second;
        rows(i, 2) = rec.r_used;
        rows(i, 3) = rec.model.n_forcing();
        rows(i, 4) = err_of(rec, "chi_x");
        rows(i, 5) = err_of(rec, "chi_y");
        rows(i, 6) = err_of(rec, "omega_x");
        rows(i, 7) = err_of(rec, "omega_y");
        rows(i, 8) = rec.recon_rms;
        if (!rec.success) {
            rc = 1;
        }
    }
    io::write_csv(dir + "/fig4.csv",
                  {"chi_x", "chi_y", "r_opt", "n_forcing", "err_chi_x", "err_chi_y",
                   "err_omega_x", "err_omega_y", "recon_rms"},
                  rows);
    return rc;
}

int reproduce_fig5(const std::string& dir, int threads) {
    ExperimentConfig base = kerr(2.0, 3.0);
    base.out_dir = dir;
    SweepSpec sweep;
    for (int n = 0; n <= 10; ++n) {
        sweep.point_overrides.push_back(
            "{\"physics.chi_x\": " + fmt(2.0 + 0.3 * n) +
            ", \"physics.chi_y\": " + fmt(3.0 + 0.2 * n) + "}");
    }
    const std::vector<ResultRecord> records = run_sweep(base, sweep, threads);

    Eigen::MatrixXd rows(records.size(), 9);
    int rc = 0;
    for (size_t i = 0; i < records.size(); ++i) {
        const double chi_x = 2.0 + 0.3 * static_cast<double>(i);
        const double chi_y = 3.0 + 0.2 * static_cast<double>(i);
        rows(i, 0) = static_cast<double>(i);
        rows(i, 1) = chi_x;
        rows(i, 2) = chi_y;
        rows(i, 3) = records[i].r_used;
        rows(i, 4) = err_of(records[i], "chi_x");
        rows(i, 5) = err_of(records[i], "chi_y");
        rows(i, 6) = err_of(records[i], "omega_x");
        rows(i, 7) = err_of(records[i], "omega_y");
        rows(i, 8) = std::max({rows(i, 4), rows(i, 5), rows(i, 6), rows(i, 7)});
        if (!records[i].success) {
            rc = 1;
        }
    }
    io::write_csv(dir + "/fig5.csv",
                  {"n", "chi_x", "chi_y", "r_opt", "err_chi_x", "err_chi_y",
                   "err_omega_x", "err_omega_y", "err_max"},
                  rows);
    return rc;
}

int reproduce_fig6(const std::string& dir, int) {
    ExperimentConfig c = kerr(5.0, 5.0, /*closed=*/true);
    c.out_dir = dir + "/optimal_rank";
    const ResultRecord at_opt = run_experiment(c);
    int rc = at_opt.success ? 0 : 1;

    ExperimentConfig near = c;
    near.out_dir = dir + "/near_rank";
    near.mhavok.r = std::max(2, at_opt.r_used - 2);
    const ResultRecord off_opt = run_experiment(near);
    if (!off_opt.success) {
        rc = 1;
    }

    Eigen::MatrixXd rows(2, 3);
    rows << at_opt.r_used, at_opt.recon_rms, at_opt.signal_rms,
            off_opt.r_used, off_opt.recon_rms, off_opt.signal_rms;
    io::write_csv(dir + "/fig6.csv", {"r", "recon_rms", "signal_rms"}, rows);
    return rc;
}

int reproduce_fig7(const std::string& dir, int) {
    ExperimentConfig c = jaynes_cummings(0.15, 2.0 * kPi);
    c.out_dir = dir + "/jc_resonant";
    const ResultRecord rec = run_experiment(c);

    Eigen::MatrixXd rows(1, 4);
    rows(0, 0) = c.g;
    const auto it = rec.report.retrieved.find("g");
    rows(0, 1) = it != rec.report.retrieved.end() ? it->second
                                                  : std::numeric_limits<double>::quiet_NaN();
    rows(0, 2) = err_of(rec, "g");
    rows(0, 3) = rec.r_used;
    io::write_csv(dir + "/fig7.csv", {"g", "g_hat", "err_g", "r_opt"}, rows);
    return rec.success ? 0 : 1;
}

int reproduce_fig8(const std::string& dir, int) {
    ExperimentConfig c = modulated(4.0, kPi / std::numbers::e);
    c.out_dir = dir + "/modulated_delta4";
    const ResultRecord rec = run_experiment(c);
    if (!rec.success) {
        return 1;
    }
    Eigen::MatrixXd rows(rec.spectrum.eigenvalues.size(), 2);
    for (Eigen::Index i = 0; i < rec.spectrum.eigenvalues.size(); ++i) {
        rows(i, 0) = rec.spectrum.eigenvalues(i).real();
        rows(i, 1) = rec.spectrum.eigenvalues(i).imag();
    }
    io::write_csv(dir + "/fig8.csv", {"re_lambda", "im_lambda"}, rows);
    return 0;
}

int reproduce_table2(const std::string& dir, int threads) {
    ExperimentConfig base = cross_kerr(0.05);
    base.out_dir = dir;
    SweepSpec sweep;
    for (const double chi : {0.05, 0.10, 0.15, 0.20, 0.25}) {
        sweep.point_overrides.push_back("{\"physics.chi_xy\": " + fmt(chi) + "}");
    }
    const std::vector<ResultRecord> records = run_sweep(base, sweep, threads);

    Eigen::MatrixXd rows(records.size(), 3);
    int rc = 0;
    const double chis[] = {0.05, 0.10, 0.15, 0.20, 0.25};
    for (size_t i = 0; i < records.size(); ++i) {
        rows(i, 0) = chis[i];
        const auto it = records[i].report.retrieved.find("chi_xy");
        rows(i, 1) = it != records[i].report.retrieved.end()
            ? it->second : std::numeric_limits<double>::quiet_NaN();
        rows(i, 2) = std::abs(rows(i, 1) - rows(i, 0));
        if (!records[i].success) {
            rc = 1;
        }
    }
    io::write_csv(dir + "/table2.csv", {"chi_xy", "chi_xy_hat", "abs_error"}, rows);
    return rc;
}

} // namespace

int reproduce(const std::string& target, const std::string& out_dir, int threads) {
    const std::string dir = out_dir + "/" + target;
    std::filesystem::create_directories(dir);
    if (target == "fig2") return reproduce_fig2(dir, threads);
    if (target == "fig3") return reproduce_fig3(dir, threads);
    if (target == "fig4") return reproduce_fig4(dir, threads);
    if (target == "fig5") return reproduce_fig5(dir, threads);
    if (target == "fig6") return reproduce_fig6(dir, threads);
    if (target == "fig7") return reproduce_fig7(dir, threads);
    if (target == "fig8") return reproduce_fig8(dir, threads);
    if (target == "table2") return reproduce_table2(dir, threads);
    throw ConfigError("reproduce: unknown target '" + target + "'");
}

} // namespace havoq::repro
