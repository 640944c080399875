#include "havoq/lindblad.hpp"

#include "havoq/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>

namespace havoq {

namespace {

// Sparse operator in coordinate form. `permutation_like` marks operators with
// at most one entry per row and per column (ladder operators, σ's), which admit
// a fused one-pass sandwich L ρ L†.
struct CompiledOp {
    int dim = 0;
    bool diagonal = false;
    bool permutation_like = false;
    Eigen::VectorXcd diag;
    std::vector<int> rows, cols;
    std::vector<complexd> vals;

    static CompiledOp compile(const Operator& m) {
        CompiledOp op;
        op.dim = static_cast<int>(m.rows());
        op.diagonal = true;
        op.diag = m.diagonal();
        std::vector<int> row_count(op.dim, 0), col_count(op.dim, 0);
        for (int j = 0; j < op.dim; ++j) {
            for (int i = 0; i < op.dim; ++i) {
                if (m(i, j) != complexd(0.0, 0.0)) {
                    op.rows.push_back(i);
                    op.cols.push_back(j);
                    op.vals.push_back(m(i, j));
                    ++row_count[i];
                    ++col_count[j];
                    if (i != j) {
                        op.diagonal = false;
                    }
                }
            }
        }
        op.permutation_like = true;
        for (int i = 0; i < op.dim; ++i) {
            if (row_count[i] > 1 || col_count[i] > 1) {
                op.permutation_like = false;
                break;
            }
        }
        return op;
    }

    int nnz() const { return static_cast<int>(vals.size()); }
};

// out += L ρ L† for a permutation-like L: each (i, j) pair of entries
// contributes w_i conj(w_j) ρ(c_i, c_j) at (r_i, r_j).
void add_perm_sandwich(const CompiledOp& l, const DensityMatrix& rho, DensityMatrix& out) {
    const int n = l.nnz();
    for (int b = 0; b < n; ++b) {
        const int rj = l.rows[b];
        const int cj = l.cols[b];
        const complexd wj = std::conj(l.vals[b]);
        complexd* out_col = out.data() + static_cast<ptrdiff_t>(rj) * out.rows();
        const complexd* rho_col = rho.data() + static_cast<ptrdiff_t>(cj) * rho.rows();
        for (int a = 0; a < n; ++a) {
            out_col[l.rows[a]] += l.vals[a] * wj * rho_col[l.cols[a]];
        }
    }
}

// tmp = L ρ (coordinate loop per column).
void apply_left(const CompiledOp& l, const DensityMatrix& rho, DensityMatrix& tmp) {
    tmp.setZero();
    const int d = l.dim;
    const int n = l.nnz();
    for (int j = 0; j < d; ++j) {
        const complexd* rho_col = rho.data() + static_cast<ptrdiff_t>(j) * d;
        complexd* tmp_col = tmp.data() + static_cast<ptrdiff_t>(j) * d;
        for (int b = 0; b < n; ++b) {
            tmp_col[l.rows[b]] += l.vals[b] * rho_col[l.cols[b]];
        }
    }
}

// out += tmp L† via column AXPYs: (tmp L†)(:, r) += conj(v) tmp(:, c).
void add_right_adjoint(const CompiledOp& l, const DensityMatrix& tmp, DensityMatrix& out) {
    const int d = l.dim;
    const int n = l.nnz();
    for (int b = 0; b < n; ++b) {
        const complexd v = std::conj(l.vals[b]);
        const complexd* tmp_col = tmp.data() + static_cast<ptrdiff_t>(l.cols[b]) * d;
        complexd* out_col = out.data() + static_cast<ptrdiff_t>(l.rows[b]) * d;
        for (int i = 0; i < d; ++i) {
            out_col[i] += v * tmp_col[i];
        }
    }
}

// out += α ρ M via column AXPYs: column c of ρM gains v ρ(:, r) for M(r, c) = v.
void add_right_scaled(const CompiledOp& m, complexd alpha, const DensityMatrix& rho,
                      DensityMatrix& out) {
    const int d = m.dim;
    const int n = m.nnz();
    for (int b = 0; b < n; ++b) {
        const complexd v = alpha * m.vals[b];
        const complexd* rho_col = rho.data() + static_cast<ptrdiff_t>(m.rows[b]) * d;
        complexd* out_col = out.data() + static_cast<ptrdiff_t>(m.cols[b]) * d;
        for (int i = 0; i < d; ++i) {
            out_col[i] += v * rho_col[i];
        }
    }
}

// Model compiled for fast right-hand-side evaluation. The Hamiltonian and the
// anticommutator half are folded into K = −iH − ½ Σ L†L, so that
//   RHS(ρ) = Kρ + ρK† + Σ_j L_j ρ L_j†  (+ drive commutator).
struct CompiledLindblad {
    int dim = 0;
    CompiledOp k;
    std::vector<CompiledOp> jumps;
    bool has_drive = false;
    bool drive_diagonal = false;
    std::function<double(double)> drive_coeff;
    CompiledOp drive;

    explicit CompiledLindblad(const LindbladModel& model) {
        dim = model.dim();
        Operator keff = complexd(0.0, -1.0) * model.hamiltonian;
        for (const auto& l : model.jumps) {
            keff -= 0.5 * (l.adjoint() * l);
            jumps.push_back(CompiledOp::compile(l));
        }
        k = CompiledOp::compile(keff);
        if (model.drive) {
            has_drive = true;
            drive_coeff = model.drive->coefficient;
            drive = CompiledOp::compile(model.drive->op);
            drive_diagonal = drive.diagonal;
        }
    }

    void rhs(double t, const DensityMatrix& rho, DensityMatrix& out, DensityMatrix& tmp) const {
        const int d = dim;
        const double c = has_drive ? drive_coeff(t) : 0.0;

        if (k.diagonal && (!has_drive || drive_diagonal)) {
            // out(i,j) = (K_i − icD_i + conj(K_j) + icD_j) ρ(i,j) in one pass.
            for (int j = 0; j < d; ++j) {
                complexd kj = std::conj(k.diag(j));
                if (has_drive) {
                    kj += complexd(0.0, c * drive.diag(j).real());
                }
                const complexd* rho_col = rho.data() + static_cast<ptrdiff_t>(j) * d;
                complexd* out_col = out.data() + static_cast<ptrdiff_t>(j) * d;
                if (has_drive) {
                    for (int i = 0; i < d; ++i) {
                        out_col[i] = (k.diag(i) + complexd(0.0, -c * drive.diag(i).real()) + kj)
                                   * rho_col[i];
                    }
                } else {
                    for (int i = 0; i < d; ++i) {
                        out_col[i] = (k.diag(i) + kj) * rho_col[i];
                    }
                }
            }
        } else {
            out.setZero();
            apply_left(k, rho, tmp);
            out += tmp;
            add_right_adjoint(k, rho, out);  // out += ρ K†
            if (has_drive) {
                apply_left(drive, rho, tmp);  // out += −ic (Dρ − ρD)
                out += complexd(0.0, -c) * tmp;
                add_right_scaled(drive, complexd(0.0, c), rho, out);
            }
        }

        for (const auto& l : jumps) {
            if (l.permutation_like) {
                add_perm_sandwich(l, rho, out);
            } else {
                apply_left(l, rho, tmp);
                add_right_adjoint(l, tmp, out);
            }
        }
    }
};

struct Rk4Workspace {
    DensityMatrix k1, k2, k3, k4, stage, tmp;

    explicit Rk4Workspace(int d)
        : k1(d, d), k2(d, d), k3(d, d), k4(d, d), stage(d, d), tmp(d, d) {}
};

void rk4_step(const CompiledLindblad& sys, double t, double h,
              DensityMatrix& rho, Rk4Workspace& w) {
    sys.rhs(t, rho, w.k1, w.tmp);
    w.stage = rho + (0.5 * h) * w.k1;
    sys.rhs(t + 0.5 * h, w.stage, w.k2, w.tmp);
    w.stage = rho + (0.5 * h) * w.k2;
    sys.rhs(t + 0.5 * h, w.stage, w.k3, w.tmp);
    w.stage = rho + h * w.k3;
    sys.rhs(t + h, w.stage, w.k4, w.tmp);
    rho += (h / 6.0) * (w.k1 + 2.0 * w.k2 + 2.0 * w.k3 + w.k4);
}

int output_steps(double t_f, double dt) {
    if (dt <= 0.0 || t_f <= 0.0) {
        throw std::invalid_argument("evolve: t_f and dt must be positive");
    }
    const double ratio = t_f / dt;
    const long long n = std::llround(ratio);
    if (n < 1 || std::abs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
        throw std::invalid_argument("evolve: dt must divide t_f");
    }
    return static_cast<int>(n);
}

double top_level_population(const DensityMatrix& rho, const std::vector<int>& idx) {
    double p = 0.0;
    for (int i : idx) {
        p += rho(i, i).real();
    }
    return p;
}

// Basis indices whose x-mode (or y-mode) occupation is in the top two levels.
std::vector<int> top_two_indices(const HilbertSpec& spec, bool x_mode) {
    std::vector<int> idx;
    const int nq = spec.qubit ? 2 : 1;
    for (int ix = 0; ix < spec.n_x; ++ix) {
        for (int iy = 0; iy < spec.n_y; ++iy) {
            const bool top = x_mode ? (ix >= spec.n_x - 2) : (iy >= spec.n_y - 2);
            if (!top) {
                continue;
            }
            for (int q = 0; q < nq; ++q) {
                idx.push_back((ix * spec.n_y + iy) * nq + q);
            }
        }
    }
    return idx;
}

struct FrameVisitor {
    std::function<void(int, double, const DensityMatrix&)> fn;
};

// One integration pass at fixed substep count. Returns the violation time if a
// trace/Hermiticity/positivity tolerance is breached, otherwise nullopt.
std::optional<double> integrate_once(const CompiledLindblad& sys, const DensityMatrix& rho0,
                                     int n_out, double dt, int substeps,
                                     const EvolveOptions& opts,
                                     const std::optional<HilbertSpec>& spec,
                                     InvariantReport& report,
                                     const FrameVisitor& visit) {
    DensityMatrix rho = rho0;
    Rk4Workspace w(sys.dim);
    const double h = dt / substeps;

    std::vector<int> idx_x, idx_y;
    if (spec && opts.truncation_tol > 0.0) {
        idx_x = top_two_indices(*spec, true);
        idx_y = top_two_indices(*spec, false);
    }

    report = InvariantReport{};
    report.min_eigenvalue = 1.0;
    report.substeps_used = substeps;

    for (int k = 0; k <= n_out; ++k) {
        const double t = dt * k;
        if (!rho.allFinite()) {
            return t;
        }
        const double trace_err = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
        const double herm_err = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
        report.max_trace_error = std::max(report.max_trace_error, trace_err);
        report.max_hermiticity_error = std::max(report.max_hermiticity_error, herm_err);
        if (trace_err > opts.trace_tol || herm_err > opts.hermiticity_tol) {
            return t;
        }
        if (opts.positivity_stride > 0 && (k % opts.positivity_stride == 0 || k == n_out)) {
            const DensityMatrix sym = 0.5 * (rho + rho.adjoint().eval());
            Eigen::SelfAdjointEigenSolver<DensityMatrix> es(sym, Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues().minCoeff();
            report.min_eigenvalue = std::min(report.min_eigenvalue, lmin);
            if (lmin < -opts.positivity_tol) {
                return t;
            }
        }
        if (!idx_x.empty()) {
            const double px = top_level_population(rho, idx_x);
            const double py = top_level_population(rho, idx_y);
            report.max_top_level_population =
                std::max({report.max_top_level_population, px, py});
            if (px > opts.truncation_tol || py > opts.truncation_tol) {
                throw TruncationError(
                    "evolve: top-two Fock-level population " +
                    std::to_string(std::max(px, py)) + " at t=" + std::to_string(t) +
                    " exceeds truncation guard");
            }
        }
        visit.fn(k, t, rho);
        if (k == n_out) {
            break;
        }
        for (int s = 0; s < substeps; ++s) {
            rk4_step(sys, t + s * h, h, rho, w);
        }
    }
    return std::nullopt;
}

InvariantReport run_integration(const LindbladModel& model, const DensityMatrix& rho0,
                                double t_f, double dt, const EvolveOptions& opts,
                                const FrameVisitor& visit) {
    const std::optional<HilbertSpec>& spec = opts.layout;
    model.validate();
    if (rho0.rows() != model.hamiltonian.rows() || rho0.cols() != model.hamiltonian.cols()) {
        throw std::invalid_argument("evolve: initial state dimension mismatch");
    }
    const DensityCheck chk = check_density(rho0);
    if (chk.trace_error > 1e-9 || chk.hermiticity_error > 1e-10 || chk.min_eigenvalue < -1e-7) {
        throw std::invalid_argument("evolve: initial state violates density-matrix invariants");
    }

    const int n_out = output_steps(t_f, dt);
    const CompiledLindblad sys(model);

    int substeps = std::max(1, opts.substeps);
    InvariantReport report;
    std::optional<double> fail_time;
    for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
        fail_time = integrate_once(sys, rho0, n_out, dt, substeps, opts, spec, report, visit);
        if (!fail_time) {
            return report;
        }
        substeps *= 2;
    }
    throw IntegrationDivergedError(
        "evolve: density-matrix invariants violated at t=" + std::to_string(*fail_time) +
        " after substep refinement", *fail_time);
}

} // namespace

DensityMatrix coherent_state(complexd alpha, const HilbertSpec& spec,
                             bool qubit_excited, double discard_tol) {
    spec.validate();
    const auto mode_amplitudes = [&](int d) {
        Eigen::VectorXcd c(d);
        // c_n = e^{−|α|²/2} αⁿ/√(n!), built up iteratively
        c(0) = std::exp(-0.5 * std::norm(alpha));
        for (int n = 1; n < d; ++n) {
            c(n) = c(n - 1) * alpha / std::sqrt(static_cast<double>(n));
        }
        return c;
    };

    Eigen::VectorXcd cx = mode_amplitudes(spec.n_x);
    Eigen::VectorXcd cy = mode_amplitudes(spec.n_y);
    const double kept_x = cx.squaredNorm();
    const double kept_y = cy.squaredNorm();
    if (1.0 - kept_x > discard_tol || 1.0 - kept_y > discard_tol) {
        throw TruncationError("coherent_state: discarded population " +
                              std::to_string(std::max(1.0 - kept_x, 1.0 - kept_y)) +
                              " exceeds tolerance");
    }

    const int nq = spec.qubit ? 2 : 1;
    Eigen::VectorXcd psi(spec.dim());
    psi.setZero();
    for (int ix = 0; ix < spec.n_x; ++ix) {
        for (int iy = 0; iy < spec.n_y; ++iy) {
            const int base = (ix * spec.n_y + iy) * nq;
            if (spec.qubit) {
                psi(base + (qubit_excited ? 1 : 0)) = cx(ix) * cy(iy);
            } else {
                psi(base) = cx(ix) * cy(iy);
            }
        }
    }
    psi /= psi.norm();
    return psi * psi.adjoint();
}

DensityCheck check_density(const DensityMatrix& rho) {
    DensityCheck out;
    out.trace_error = std::abs(rho.trace() - complexd(1.0, 0.0));
    out.hermiticity_error = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
    const DensityMatrix sym = 0.5 * (rho + rho.adjoint().eval());
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(sym, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
    return out;
}

Trajectory evolve_lindblad(const LindbladModel& model, const DensityMatrix& rho0,
                           double t_f, double dt, const EvolveOptions& opts) {
    Trajectory traj;
    traj.dt = dt;
    traj.frames.reserve(static_cast<size_t>(output_steps(t_f, dt)) + 1);
    FrameVisitor visit{[&](int, double, const DensityMatrix& rho) {
        traj.frames.push_back(rho);
    }};
    run_integration(model, rho0, t_f, dt, opts, visit);
    return traj;
}

Eigen::VectorXcd expectation_series(const Trajectory& traj, const Operator& op) {
    if (traj.frames.empty()) {
        throw std::invalid_argument("expectation_series: empty trajectory");
    }
    if (op.rows() != traj.frames.front().rows() || op.cols() != traj.frames.front().cols()) {
        throw std::invalid_argument("expectation_series: operator dimension mismatch");
    }
    Eigen::VectorXcd out(traj.size());
    for (int k = 0; k < traj.size(); ++k) {
        // tr(ρO) without forming the product.
        out(k) = op.cwiseProduct(traj.frames[k].transpose()).sum();
    }
    return out;
}

double steady_state_occupation(const Trajectory& traj, const Operator& number_op,
                               double tail_fraction) {
    const Eigen::VectorXcd n = expectation_series(traj, number_op);
    return tail_mean(n.real(), tail_fraction);
}

ObservedEvolution evolve_observed(const LindbladModel& model, const DensityMatrix& rho0,
                                  double t_f, double dt,
                                  const std::vector<ObservableSpec>& observables,
                                  const EvolveOptions& opts) {
    const int n_out = output_steps(t_f, dt);
    ObservedEvolution out;
    out.series.t0 = 0.0;
    out.series.dt = dt;
    out.series.values.resize(n_out + 1, static_cast<int>(observables.size()));
    for (const auto& obs : observables) {
        out.series.names.push_back(obs.name);
        if (obs.op.rows() != model.hamiltonian.rows()) {
            throw std::invalid_argument("evolve_observed: observable dimension mismatch");
        }
    }

    // tr(ρO) as a sparse sum Σ v·ρ(c, r) over the entries O(r, c) = v.
    std::vector<CompiledOp> compiled;
    compiled.reserve(observables.size());
    for (const auto& obs : observables) {
        compiled.push_back(CompiledOp::compile(obs.op));
    }
    FrameVisitor visit{[&](int k, double, const DensityMatrix& rho) {
        for (size_t c = 0; c < observables.size(); ++c) {
            const CompiledOp& op = compiled[c];
            complexd v(0.0, 0.0);
            for (int b = 0; b < op.nnz(); ++b) {
                v += op.vals[b] * rho(op.cols[b], op.rows[b]);
            }
            out.series.values(k, static_cast<int>(c)) =
                observables[c].part == ObservableSpec::Part::real ? v.real() : v.imag();
        }
    }};
    out.invariants = run_integration(model, rho0, t_f, dt, opts, visit);
    return out;
}

} // namespace havoq
