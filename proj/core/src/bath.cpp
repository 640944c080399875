#include "havoq/bath.hpp"

#include <cmath>
#include <stdexcept>

namespace havoq {

void BathSpec::validate() const {
    if (temperature <= 0.0) {
        throw std::domain_error("BathSpec: temperature must be positive");
    }
    if (kappa < 0.0) {
        throw std::domain_error("BathSpec: damping rate must be nonnegative");
    }
}

double bose_einstein_occupation(double omega, double temperature) {
    if (omega <= 0.0) {
        throw std::domain_error("bose_einstein_occupation: omega must be positive");
    }
    if (temperature <= 0.0) {
        throw std::domain_error("bose_einstein_occupation: temperature must be positive");
    }
    return 1.0 / std::expm1(omega / temperature);
}

std::vector<Operator> build_jump_operators(const BathSpec& bath,
                                           double omega_x, double omega_y,
                                           const OperatorSet& ops,
                                           const std::optional<QubitRates>& qubit) {
    bath.validate();
    std::vector<Operator> jumps;

    if (bath.kappa > 0.0) {
        const double nbar_x = bose_einstein_occupation(omega_x, bath.temperature);
        const double nbar_y = bose_einstein_occupation(omega_y, bath.temperature);

        Operator lower_x = ops.a_x;
        Operator lower_y = ops.a_y;
        if (bath.common_environment) {
            const complexd phase = std::exp(complexd(0.0, bath.phi));
            const Operator mixed = ops.a_x + phase * ops.a_y;
            lower_x = mixed;
            lower_y = mixed;
        }
        for (const auto& [lower, nbar] : {std::pair{lower_x, nbar_x}, std::pair{lower_y, nbar_y}}) {
            jumps.push_back(std::sqrt(bath.kappa * (nbar + 1.0)) * lower);
            jumps.push_back(std::sqrt(bath.kappa * nbar) * Operator(lower.adjoint()));
        }
    }

    if (qubit) {
        if (ops.sz.size() == 0) {
            throw std::invalid_argument("build_jump_operators: qubit rates given but no qubit factor");
        }
        if (qubit->relaxation < 0.0 || qubit->dephasing < 0.0) {
            throw std::domain_error("build_jump_operators: qubit rates must be nonnegative");
        }
        if (qubit->relaxation > 0.0) {
            jumps.push_back(std::sqrt(qubit->relaxation) * ops.sm);
        }
        if (qubit->dephasing > 0.0) {
            jumps.push_back(std::sqrt(qubit->dephasing) * ops.sz);
        }
    }
    return jumps;
}

} // namespace havoq
