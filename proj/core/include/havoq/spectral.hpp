// spectral.hpp — eigen-analysis of the retrieved dynamics matrix and the
// per-system parameter-retrieval recipes.

#pragma once

#include "havoq/hilbert.hpp"

#include <map>
#include <string>
#include <vector>

namespace havoq {

// A conjugate pair (or a real eigenvalue with ω = 0): λ = σ ± iω.
struct SpectralMode {
    double decay = 0.0;  // Re λ
    double omega = 0.0;  // |Im λ|
    int idx_plus = -1;   // eigenvalue indices backing the mode
    int idx_minus = -1;
};

struct EigenSpectrum {
    Eigen::VectorXcd eigenvalues;       // continuous-time, rad / time unit
    std::vector<SpectralMode> modes;    // conjugate pairs, ascending ω
    std::vector<SpectralMode> unpaired; // real eigenvalues reported with ω = 0
    double dt = 0.0;

    std::vector<double> frequencies() const;  // ω of the paired modes
};

// Full eigendecomposition of a real nonsymmetric matrix with conjugate pairing
// at tolerance 1e-8·‖A‖_F.
EigenSpectrum eigen_spectrum(const Eigen::MatrixXd& a, double dt);

struct ParameterReport {
    std::string system;
    std::map<std::string, double> retrieved;
    std::map<std::string, double> truth;
    std::map<std::string, double> percent_errors;
    std::map<std::string, std::vector<int>> provenance;  // parameter → eigenvalue indices
    std::vector<std::string> flags;
    std::vector<complexd> eigenvalues;
};

// Fills truth and percent errors (absolute error, flagged, when truth is 0).
void finalize_report(ParameterReport& report, const std::map<std::string, double>& truth);

// ω̂y = smallest pair frequency, ω̂x = largest, κ̂ = −2·mean(Re λ) over pairs.
ParameterReport retrieve_qho_params(const EigenSpectrum& spec);

// Splits the pair frequencies into two arithmetic ladders ω_i + nχ_i; first
// rungs give ω̂, consecutive rung differences give χ̂. The ladder with the
// lower first rung is reported as the y-mode.
struct KerrLadderOptions {
    int expected_rungs = 4;    // rungs per ladder considered in the grouping
    double ambiguity_tol = 0.1;  // max RMS rung deviation, relative to min spacing
};
ParameterReport retrieve_kerr_ladder(const EigenSpectrum& spec,
                                     const KerrLadderOptions& opts = {});

// χ̂xy from Ω̂_i = ω_i + χ̂xy ⟨n_j⟩_ss, averaged over both modes. Ω̂_i are the
// pair frequencies nearest the known bare frequencies.
struct CrossKerrInputs {
    double omega_x = 0.0, omega_y = 0.0;  // known bare frequencies
    double n_x_ss = 0.0, n_y_ss = 0.0;    // steady-state occupations
};
ParameterReport retrieve_cross_kerr(const EigenSpectrum& spec, const CrossKerrInputs& in);

// Inverts ω± = ½[(ωq + ωx) ± √(4g² + Δ²)]. The dressed pair is the bracketing
// pair whose centroid best matches (ωq + ωx)/2 (the trace of the linearized
// coupling matrix is basis-independent). Below-detuning splittings report
// ĝ = 0 with a flag.
ParameterReport retrieve_jc_coupling(const EigenSpectrum& spec, double omega_q,
                                     double omega_x);

// Fits the pair frequencies (after removing the ω̂y line) to the sideband comb
// {ω̂x + m ω̂f}. Throws UnresolvedSidebandsError when no integer assignment
// fits within tolerance.
struct SidebandOptions {
    int m_window = 5;           // |m| search window
    double residual_tol = 0.02; // max RMS comb residual, relative to the spacing
};
ParameterReport retrieve_modulation_frequency(const EigenSpectrum& spec,
                                              double omega_x_hint, double omega_y_hint,
                                              const SidebandOptions& opts = {});

// ⟨a_x(t)⟩ = α₀ e^{−κt/2} Σ_{|m|≤M} J_m(δ/ωf) e^{−i(ωx + mωf)t}.
complexd modulation_oracle(complexd alpha0, double kappa, double omega_x,
                           double delta, double omega_f, double t, int bessel_order);

} // namespace havoq
