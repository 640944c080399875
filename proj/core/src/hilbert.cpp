#include "havoq/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace havoq {

namespace {

Operator identity(int d) {
    return Operator::Identity(d, d);
}

Operator kron(const Operator& a, const Operator& b) {
    Operator out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace

void HilbertSpec::validate() const {
    if (n_x < 2 || n_y < 2) {
        throw std::invalid_argument("HilbertSpec: mode truncations must be at least 2");
    }
}

Operator annihilation(int d) {
    Operator a = Operator::Zero(d, d);
    for (int n = 1; n < d; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

Operator embed_x(const Operator& m, const HilbertSpec& spec) {
    Operator out = kron(m, identity(spec.n_y));
    if (spec.qubit) {
        out = kron(out, identity(2));
    }
    return out;
}

Operator embed_y(const Operator& m, const HilbertSpec& spec) {
    Operator out = kron(identity(spec.n_x), m);
    if (spec.qubit) {
        out = kron(out, identity(2));
    }
    return out;
}

Operator embed_qubit(const Operator& m, const HilbertSpec& spec) {
    if (!spec.qubit) {
        throw std::invalid_argument("embed_qubit: spec has no qubit factor");
    }
    return kron(identity(spec.n_x * spec.n_y), m);
}

OperatorSet build_operators(const HilbertSpec& spec) {
    spec.validate();
    OperatorSet ops;
    ops.spec = spec;
    const Operator ax = annihilation(spec.n_x);
    const Operator ay = annihilation(spec.n_y);
    ops.a_x = embed_x(ax, spec);
    ops.ad_x = ops.a_x.adjoint();
    ops.a_y = embed_y(ay, spec);
    ops.ad_y = ops.a_y.adjoint();
    if (spec.qubit) {
        // Basis ordering |g⟩ = e0, |e⟩ = e1, so σ₊ = |e⟩⟨g|.
        Operator sz = Operator::Zero(2, 2);
        sz(0, 0) = -1.0;
        sz(1, 1) = 1.0;
        Operator sp = Operator::Zero(2, 2);
        sp(1, 0) = 1.0;
        ops.sz = embed_qubit(sz, spec);
        ops.sp = embed_qubit(sp, spec);
        ops.sm = ops.sp.adjoint();
    }
    return ops;
}

// a a† is evaluated through the ladder algebra (n + 1) rather than the literal
// truncated product, whose top-level eigenvalue would collapse to zero.
Operator OperatorSet::number_x(NumberOrdering ord) const {
    Operator n = ad_x * a_x;
    if (ord == NumberOrdering::annihilation_first) {
        n += Operator::Identity(n.rows(), n.cols());
    }
    return n;
}

Operator OperatorSet::number_y(NumberOrdering ord) const {
    Operator n = ad_y * a_y;
    if (ord == NumberOrdering::annihilation_first) {
        n += Operator::Identity(n.rows(), n.cols());
    }
    return n;
}

Operator OperatorSet::quad_x() const { return (a_x + ad_x) / std::sqrt(2.0); }
Operator OperatorSet::quad_y() const { return (a_y + ad_y) / std::sqrt(2.0); }

Operator OperatorSet::mom_x() const {
    return complexd(0.0, 1.0) * (ad_x - a_x) / std::sqrt(2.0);
}
Operator OperatorSet::mom_y() const {
    return complexd(0.0, 1.0) * (ad_y - a_y) / std::sqrt(2.0);
}

namespace {

Operator top_two(int d) {
    Operator p = Operator::Zero(d, d);
    p(d - 1, d - 1) = 1.0;
    p(d - 2, d - 2) = 1.0;
    return p;
}

} // namespace

Operator OperatorSet::top_two_projector_x() const {
    return embed_x(top_two(spec.n_x), spec);
}

Operator OperatorSet::top_two_projector_y() const {
    return embed_y(top_two(spec.n_y), spec);
}

double hermiticity_defect(const Operator& m) {
    const double norm = m.norm();
    if (norm == 0.0) {
        return 0.0;
    }
    return (m - m.adjoint()).norm() / norm;
}

} // namespace havoq
