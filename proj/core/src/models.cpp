#include "havoq/models.hpp"

#include <cmath>
#include <stdexcept>

namespace havoq {

void LindbladModel::validate() const {
    if (hamiltonian.rows() != hamiltonian.cols()) {
        throw std::invalid_argument("LindbladModel: Hamiltonian must be square");
    }
    if (hermiticity_defect(hamiltonian) > 1e-12) {
        throw std::invalid_argument("LindbladModel: Hamiltonian is not Hermitian");
    }
    for (const auto& jump : jumps) {
        if (jump.rows() != hamiltonian.rows() || jump.cols() != hamiltonian.cols()) {
            throw std::invalid_argument("LindbladModel: jump operator dimension mismatch");
        }
    }
    if (drive && (drive->op.rows() != hamiltonian.rows() || drive->op.cols() != hamiltonian.cols())) {
        throw std::invalid_argument("LindbladModel: drive operator dimension mismatch");
    }
}

Operator build_qho_hamiltonian(double omega_x, double omega_y, const HilbertSpec& spec,
                               NumberOrdering ord) {
    const OperatorSet ops = build_operators(spec);
    return omega_x * ops.number_x(ord) + omega_y * ops.number_y(ord);
}

Operator build_kerr_hamiltonian(double chi_x, double chi_y, double chi_xy,
                                const HilbertSpec& spec, NumberOrdering ord) {
    const OperatorSet ops = build_operators(spec);
    Operator h = 0.5 * chi_x * ops.ad_x * ops.ad_x * ops.a_x * ops.a_x
               + 0.5 * chi_y * ops.ad_y * ops.ad_y * ops.a_y * ops.a_y;
    if (chi_xy != 0.0) {
        h += chi_xy * ops.number_x(ord) * ops.number_y(ord);
    }
    return h;
}

Operator build_jc_hamiltonian(double qubit_splitting, double coupling,
                              const HilbertSpec& spec) {
    if (!spec.qubit) {
        throw std::invalid_argument("build_jc_hamiltonian: spec has no qubit factor");
    }
    const OperatorSet ops = build_operators(spec);
    return 0.5 * qubit_splitting * ops.sz
         + coupling * (ops.a_x * ops.sp + ops.ad_x * ops.sm);
}

DriveTerm build_modulation_drive(double delta, double omega_f, const HilbertSpec& spec) {
    if (omega_f <= 0.0) {
        throw std::domain_error("build_modulation_drive: omega_f must be positive");
    }
    const OperatorSet ops = build_operators(spec);
    DriveTerm term;
    term.coefficient = [delta, omega_f](double t) { return delta * std::cos(omega_f * t); };
    term.op = ops.number_x(NumberOrdering::creation_first);
    return term;
}

} // namespace havoq
