// config.hpp — experiment configuration with Table-I defaults, and sweep specs.

#pragma once

#include "havoq/hilbert.hpp"

#include <string>
#include <vector>

namespace havoq {

enum class SystemKind { qho, kerr, cross_kerr, jaynes_cummings, modulated, kerr_closed };

std::string to_string(SystemKind k);
SystemKind system_from_string(const std::string& s);

struct MhavokConfig {
    int m = 100;
    double tau = 0.95;
    int r = 0;  // 0 = auto via the condition-number sweep
    int r_max = 30;
};

struct BaselineConfig {
    bool fft = true;
    bool pencil = true;
    int pencil_l = 0;  // 0 → ⌊N/3⌋
    int pencil_p = 4;
};

struct GridConfig {
    double t_f = 50.0;
    double dt = 0.01;
};

struct ExperimentConfig {
    SystemKind system = SystemKind::qho;

    // Oscillator and bath (Table-I defaults).
    double omega_x = 2.0 * 3.14159265358979323846;
    double omega_y = 3.14159265358979323846;
    double temperature = 2.0;
    double kappa = 0.1;
    double phi = 0.0;
    bool common_environment = false;
    NumberOrdering ordering = NumberOrdering::annihilation_first;

    // Kerr strengths.
    double chi_x = 0.0, chi_y = 0.0, chi_xy = 0.0;

    // Qubit (Jaynes–Cummings).
    double omega_q = 2.0 * 3.14159265358979323846;
    double g = 0.0;
    double gamma = 0.1;
    double gamma_phi = 0.01;

    // Parametric modulation.
    double delta = 0.0;
    double omega_f = 0.0;

    // Initial coherent state and truncations.
    double alpha_re = 1.0, alpha_im = 0.0;
    int n_x = 10, n_y = 10;

    // Window used for steady-state occupations (cross-Kerr retrieval).
    double tail_fraction = 1.0;

    GridConfig grid;
    MhavokConfig mhavok;
    BaselineConfig baselines;
    std::string out_dir;

    void validate() const;
    bool needs_qubit() const { return system == SystemKind::jaynes_cummings; }
    HilbertSpec hilbert() const { return HilbertSpec{n_x, n_y, needs_qubit()}; }
};

// JSON round trip. Parsing fills Table-I defaults for absent keys but requires
// the system-specific parameters (χ's, g, δ/ωf) to be given explicitly.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& config);

struct SweepSpec {
    std::string parameter;                     // dotted path, e.g. "physics.kappa"
    std::vector<double> values;                // ignored when points are given
    std::vector<std::string> point_overrides;  // JSON objects merged per point

    size_t size() const {
        return point_overrides.empty() ? values.size() : point_overrides.size();
    }
};

SweepSpec parse_sweep(const std::string& json_text);
SweepSpec load_sweep(const std::string& path);

// Applies one sweep point onto a base configuration.
ExperimentConfig apply_sweep_point(const ExperimentConfig& base, const SweepSpec& sweep,
                                   size_t index);

} // namespace havoq
