// hilbert.hpp — truncated tensor-product Hilbert space and its ladder operators.
//
// Factor ordering is (x-mode, y-mode, qubit); an x-mode operator M embeds as
// M ⊗ I_y ⊗ I_q. All operators are dense complex matrices in dimensionless
// units (ħ = 1).

#pragma once

#include <Eigen/Dense>
#include <complex>

namespace havoq {

using Operator = Eigen::MatrixXcd;
using complexd = std::complex<double>;

// Number-operator ordering. `annihilation_first` keeps n = a a† (= a†a + 1);
// `creation_first` is the textbook n = a†a. The constant offset only matters
// for the cross-Kerr term, where it shifts both mode frequencies by χxy.
enum class NumberOrdering {
    annihilation_first,  // n = a a†
    creation_first,      // n = a† a
};

struct HilbertSpec {
    int n_x = 10;         // Fock truncation of the x-mode
    int n_y = 10;         // Fock truncation of the y-mode
    bool qubit = false;   // append a two-level factor

    int dim() const { return n_x * n_y * (qubit ? 2 : 1); }
    void validate() const;
};

// Single-mode annihilation operator on d levels: a|n⟩ = √n |n−1⟩.
Operator annihilation(int d);

// Tensor embedding into the full space.
Operator embed_x(const Operator& m, const HilbertSpec& spec);
Operator embed_y(const Operator& m, const HilbertSpec& spec);
Operator embed_qubit(const Operator& m, const HilbertSpec& spec);

// All operators the model builders need, embedded in the full space.
struct OperatorSet {
    HilbertSpec spec;
    Operator a_x, ad_x;   // annihilation / creation, x-mode
    Operator a_y, ad_y;
    Operator sz, sp, sm;  // σz, σ₊, σ₋ (empty when no qubit factor)

    Operator number_x(NumberOrdering ord = NumberOrdering::annihilation_first) const;
    Operator number_y(NumberOrdering ord = NumberOrdering::annihilation_first) const;

    // Quadratures x = (a + a†)/√2, p = i(a† − a)/√2.
    Operator quad_x() const;
    Operator quad_y() const;
    Operator mom_x() const;
    Operator mom_y() const;

    // Projector onto the top two Fock levels of a mode (truncation guard).
    Operator top_two_projector_x() const;
    Operator top_two_projector_y() const;
};

OperatorSet build_operators(const HilbertSpec& spec);

// Relative Frobenius deviation from Hermiticity.
double hermiticity_defect(const Operator& m);

} // namespace havoq
