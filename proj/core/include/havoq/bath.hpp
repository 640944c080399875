// bath.hpp — thermal environment and the jump operators it induces.

#pragma once

#include "havoq/hilbert.hpp"

#include <optional>
#include <vector>

namespace havoq {

struct BathSpec {
    double temperature = 2.0;  // k_B = 1
    double kappa = 0.1;        // damping rate
    double phi = 0.0;          // relative phase between the two modes

    // When true, each jump uses the mode-mixing combination a_x + e^{iφ} a_y.
    // The default couples each mode to the bath separately, which is the form
    // consistent with the closed-form linear evolution of the first moments
    // (per-mode amplitude decay at κ/2, no cross term).
    bool common_environment = false;

    void validate() const;
};

struct QubitRates {
    double relaxation = 0.1;  // γ, jump √γ σ₋
    double dephasing = 0.01;  // γφ, jump √γφ σz
};

// Bose–Einstein occupation 1/(exp(ω/T) − 1) with ħ = k_B = 1.
double bose_einstein_occupation(double omega, double temperature);

// Thermal decay/excitation jumps for both modes with prefactors
// √(κ(n̄_i + 1)) and √(κ n̄_i); optionally the qubit relaxation and
// dephasing jumps. κ = 0 with no qubit rates yields an empty list.
std::vector<Operator> build_jump_operators(const BathSpec& bath,
                                           double omega_x, double omega_y,
                                           const OperatorSet& ops,
                                           const std::optional<QubitRates>& qubit = std::nullopt);

} // namespace havoq
