// experiment.hpp — one full identification run: simulate, embed, fit, retrieve,
// compare against the reference estimators, persist.

#pragma once

#include "havoq/config.hpp"
#include "havoq/lindblad.hpp"
#include "havoq/mhavok.hpp"
#include "havoq/spectral.hpp"

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace havoq {

struct BaselineErrors {
    bool ran = false;
    double fft_mean_omega_err = std::numeric_limits<double>::quiet_NaN();
    double pencil_mean_omega_err = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> fft_omegas;     // ω̂ per target mode
    std::vector<double> pencil_omegas;  // nearest pencil pole frequencies
};

struct ResultRecord {
    ExperimentConfig config;
    bool success = false;
    std::string error;       // failure description when a stage failed
    std::string error_type;  // short tag, e.g. "unresolved_sidebands"

    MultichannelSeries series;  // all observed channels
    int fit_channels = 0;       // leading channels fed to the fit
    InvariantReport invariants;

    bool rank_auto = false;
    RankSweep rank_sweep;
    int r_used = 0;
    HavokModel model;
    Reconstruction recon;
    double recon_rms = std::numeric_limits<double>::quiet_NaN();
    double signal_rms = std::numeric_limits<double>::quiet_NaN();

    EigenSpectrum spectrum;
    ParameterReport report;
    double mhavok_mean_omega_err = std::numeric_limits<double>::quiet_NaN();

    BaselineErrors baselines;
    std::vector<std::pair<std::string, double>> timings_s;
};

// Runs the full pipeline. Configuration errors throw ConfigError; stage errors
// are recorded in the result so sweeps can continue.
ResultRecord run_experiment(const ExperimentConfig& config);

// Simulation stage alone: the configured system's observable channels.
std::pair<MultichannelSeries, InvariantReport> simulate_channels(const ExperimentConfig& config);

// Independent runs per sweep point, executed on up to `threads` workers.
// Records are ordered by point index; failures are recorded, never thrown.
std::vector<ResultRecord> run_sweep(const ExperimentConfig& base, const SweepSpec& sweep,
                                    int threads = 1);

// Ground-truth parameter values of a configuration, keyed like the reports.
std::map<std::string, double> truth_parameters(const ExperimentConfig& config);

// Writes config/series/model/report/record files into `dir`.
void persist_record(const ResultRecord& record, const std::string& dir);

// One row per point: overridden value, success, retrieved values, percent
// errors, and baseline errors.
void write_sweep_summary(const std::string& path, const std::vector<ResultRecord>& records,
                         const SweepSpec& sweep);

} // namespace havoq
