// models.hpp — Hamiltonians of the model zoo and the Lindblad model container.

#pragma once

#include "havoq/bath.hpp"
#include "havoq/hilbert.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace havoq {

// Time-dependent Hamiltonian term c(t) · op.
struct DriveTerm {
    std::function<double(double)> coefficient;
    Operator op;
};

struct LindbladModel {
    Operator hamiltonian;             // static part, Hermitian
    std::optional<DriveTerm> drive;
    std::vector<Operator> jumps;

    int dim() const { return static_cast<int>(hamiltonian.rows()); }
    // Checks Hermiticity of H (1e-12 relative) and jump dimensions.
    void validate() const;
};

// H0 = ωx a_x a_x† + ωy a_y a_y† (annihilation_first) or the normal-ordered
// ωx a_x† a_x + ωy a_y† a_y; the two differ by a constant.
Operator build_qho_hamiltonian(double omega_x, double omega_y, const HilbertSpec& spec,
                               NumberOrdering ord = NumberOrdering::annihilation_first);

// H_Kerr = (χx/2) a_x†²a_x² + (χy/2) a_y†²a_y² + χxy n_x n_y, with n per `ord`.
Operator build_kerr_hamiltonian(double chi_x, double chi_y, double chi_xy,
                                const HilbertSpec& spec,
                                NumberOrdering ord = NumberOrdering::annihilation_first);

// H_JC = (Ω/2) σz + g (a_x σ₊ + a_x† σ₋). Requires the qubit factor.
Operator build_jc_hamiltonian(double qubit_splitting, double coupling,
                              const HilbertSpec& spec);

// H_f(t) = δ cos(ωf t) · a_x† a_x, returned as (coefficient, static operator).
DriveTerm build_modulation_drive(double delta, double omega_f, const HilbertSpec& spec);

} // namespace havoq
