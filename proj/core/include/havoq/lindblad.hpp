// lindblad.hpp — density matrices and fixed-step integration of the
// Lindblad master equation
//
//   dρ/dt = −i[H(t), ρ] + Σ_j ( L_j ρ L_j† − ½ {L_j† L_j, ρ} ).

#pragma once

#include "havoq/models.hpp"
#include "havoq/series.hpp"

#include <optional>
#include <string>
#include <vector>

namespace havoq {

using DensityMatrix = Eigen::MatrixXcd;

// |α⟩_x ⊗ |α⟩_y (⊗ qubit level), renormalized after truncation. Throws
// TruncationError when either mode discards more than `discard_tol` population.
DensityMatrix coherent_state(complexd alpha, const HilbertSpec& spec,
                             bool qubit_excited = false, double discard_tol = 1e-6);

struct DensityCheck {
    double trace_error;      // |tr ρ − 1|
    double hermiticity_error;  // max |ρ − ρ†|
    double min_eigenvalue;   // of the Hermitian part
};
DensityCheck check_density(const DensityMatrix& rho);

struct EvolveOptions {
    int substeps = 5;             // internal step dt/substeps
    int max_refinements = 3;      // substep doublings tried when drift fails
    double trace_tol = 1e-8;
    double hermiticity_tol = 1e-10;
    double positivity_tol = 1e-7;
    int positivity_stride = 100;  // frames between positivity checks; 0 disables
    double truncation_tol = 1e-4; // top-two-Fock-level population guard; 0 disables
    // Factor layout for the truncation guard; the guard is skipped when absent.
    std::optional<HilbertSpec> layout;
};

struct Trajectory {
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<DensityMatrix> frames;

    int size() const { return static_cast<int>(frames.size()); }
    double time_at(int k) const { return t0 + dt * k; }
};

// Full trajectory, ⌊t_f/dt⌋ + 1 frames. Intended for small dimensions; for
// long runs at dim ~ 200 prefer evolve_observed.
Trajectory evolve_lindblad(const LindbladModel& model, const DensityMatrix& rho0,
                           double t_f, double dt, const EvolveOptions& opts = {});

// ⟨O⟩(t_k) = tr(ρ(t_k) O) along a stored trajectory.
Eigen::VectorXcd expectation_series(const Trajectory& traj, const Operator& op);

// Mean of ⟨number_op⟩ over the final tail_fraction of the trajectory.
double steady_state_occupation(const Trajectory& traj, const Operator& number_op,
                               double tail_fraction);

// Streaming evolution: expectation channels are recorded per output step and
// density matrices are discarded.
struct ObservableSpec {
    enum class Part { real, imag };
    std::string name;
    Operator op;
    Part part = Part::real;
};

struct InvariantReport {
    double max_trace_error = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    double max_top_level_population = 0.0;
    int substeps_used = 0;
};

struct ObservedEvolution {
    MultichannelSeries series;
    InvariantReport invariants;
};

ObservedEvolution evolve_observed(const LindbladModel& model, const DensityMatrix& rho0,
                                  double t_f, double dt,
                                  const std::vector<ObservableSpec>& observables,
                                  const EvolveOptions& opts = {});

} // namespace havoq
