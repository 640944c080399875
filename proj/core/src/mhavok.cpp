#include "havoq/mhavok.hpp"

#include "havoq/errors.hpp"
#include "havoq/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace havoq {

SvdBundle thin_svd(const BlockHankel& h) {
    if (h.mat.size() == 0) {
        throw std::invalid_argument("thin_svd: empty Hankel matrix");
    }
    const linalg::ThinSvd f = linalg::thin_svd(h.mat);
    return SvdBundle{f.u, f.s, f.v};
}

Eigen::MatrixXd differentiate(const Eigen::MatrixXd& v, double dt) {
    if (v.rows() < 5) {
        throw std::invalid_argument("differentiate: need at least 5 rows");
    }
    if (dt <= 0.0) {
        throw std::invalid_argument("differentiate: dt must be positive");
    }
    const Eigen::Index n = v.rows() - 4;
    Eigen::MatrixXd vdot(n, v.cols());
    const double inv12h = 1.0 / (12.0 * dt);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::Index c = i + 2;  // interior row in v
        vdot.row(i) = (-v.row(c + 2) + 8.0 * v.row(c + 1)
                       - 8.0 * v.row(c - 1) + v.row(c - 2)) * inv12h;
    }
    return vdot;
}

Eigen::MatrixXd fit_linear_map(const Eigen::MatrixXd& v, const Eigen::MatrixXd& vdot) {
    if (v.rows() != vdot.rows()) {
        throw std::invalid_argument("fit_linear_map: row mismatch");
    }
    if (v.rows() <= v.cols()) {
        throw std::invalid_argument("fit_linear_map: need more rows than columns");
    }
    // Prediction is V Cᵀ, so C holds the transposed least-squares solution.
    return linalg::lstsq(v, vdot).transpose();
}

ModeClassification classify_modes(const Eigen::MatrixXd& v, const Eigen::MatrixXd& vdot,
                                  const Eigen::MatrixXd& c, double tau) {
    if (tau <= 0.0 || tau >= 1.0) {
        throw std::invalid_argument("classify_modes: tau must be in (0, 1)");
    }
    if (v.rows() != vdot.rows() || v.cols() != vdot.cols() ||
        c.rows() != v.cols() || c.cols() != v.cols()) {
        throw std::invalid_argument("classify_modes: inconsistent shapes");
    }
    const Eigen::MatrixXd pred = v * c.transpose();
    ModeClassification out;
    out.r2.resize(v.cols());
    for (Eigen::Index i = 0; i < v.cols(); ++i) {
        const Eigen::VectorXd resid = vdot.col(i) - pred.col(i);
        const double mean = vdot.col(i).mean();
        const double denom = (vdot.col(i).array() - mean).matrix().squaredNorm();
        // Zero variance up to rounding of the column itself.
        if (denom < 1e-300 || denom <= 1e-24 * vdot.col(i).squaredNorm()) {
            out.r2(i) = -std::numeric_limits<double>::infinity();
            out.forcing.push_back(static_cast<int>(i));
            out.zero_variance.push_back(static_cast<int>(i));
            continue;
        }
        out.r2(i) = 1.0 - resid.squaredNorm() / denom;
        if (out.r2(i) >= tau) {
            out.linear.push_back(static_cast<int>(i));
        } else {
            out.forcing.push_back(static_cast<int>(i));
        }
    }
    return out;
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> fit_forced_model(const Eigen::MatrixXd& v_c,
                                                             const Eigen::MatrixXd& v_f,
                                                             const Eigen::MatrixXd& vdot_c) {
    if (v_c.rows() != vdot_c.rows() || (v_f.size() > 0 && v_f.rows() != v_c.rows())) {
        throw std::invalid_argument("fit_forced_model: row mismatch");
    }
    const Eigen::Index nc = v_c.cols();
    const Eigen::Index nf = v_f.cols();
    if (nc == 0) {
        throw std::invalid_argument("fit_forced_model: no linear modes");
    }
    Eigen::MatrixXd g(v_c.rows(), nc + nf);
    g.leftCols(nc) = v_c;
    if (nf > 0) {
        g.rightCols(nf) = v_f;
    }
    const Eigen::MatrixXd sol = linalg::lstsq(g, vdot_c);  // (nc+nf) × nc
    Eigen::MatrixXd a = sol.topRows(nc).transpose();
    Eigen::MatrixXd b = sol.bottomRows(nf).transpose();
    return {std::move(a), std::move(b)};
}

Eigen::MatrixXd simulate_forced(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                                const Eigen::MatrixXd& u, const Eigen::VectorXd& x0,
                                double dt, int n_rows) {
    const Eigen::Index nc = a.rows();
    if (a.cols() != nc || x0.size() != nc) {
        throw std::invalid_argument("simulate_forced: shape mismatch");
    }
    const bool forced = b.cols() > 0;
    if (forced && (b.rows() != nc || u.cols() != b.cols() || u.rows() < n_rows)) {
        throw std::invalid_argument("simulate_forced: forcing shape mismatch");
    }
    if (n_rows < 1) {
        throw std::invalid_argument("simulate_forced: need at least one row");
    }

    Eigen::MatrixXd x(n_rows, nc);
    Eigen::VectorXd state = x0;
    x.row(0) = state.transpose();
    Eigen::VectorXd k1(nc), k2(nc), k3(nc), k4(nc), mid(nc);
    for (int k = 0; k + 1 < n_rows; ++k) {
        if (forced) {
            const Eigen::VectorXd u0 = u.row(k).transpose();
            const Eigen::VectorXd u1 = u.row(k + 1).transpose();
            const Eigen::VectorXd uh = 0.5 * (u0 + u1);
            k1 = a * state + b * u0;
            mid = state + (0.5 * dt) * k1;
            k2 = a * mid + b * uh;
            mid = state + (0.5 * dt) * k2;
            k3 = a * mid + b * uh;
            mid = state + dt * k3;
            k4 = a * mid + b * u1;
        } else {
            k1 = a * state;
            k2 = a * (state + (0.5 * dt) * k1);
            k3 = a * (state + (0.5 * dt) * k2);
            k4 = a * (state + dt * k3);
        }
        state += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!state.allFinite()) {
            throw IntegrationDivergedError("simulate_forced: state became non-finite",
                                           dt * (k + 1));
        }
        x.row(k + 1) = state.transpose();
    }
    return x;
}

double condition_number(const Eigen::MatrixXd& b) {
    if (b.size() == 0) {
        throw std::invalid_argument("condition_number: empty matrix (no forcing modes)");
    }
    const Eigen::VectorXd s = linalg::singular_values(b);
    const double smin = s(s.size() - 1);
    if (smin < 1e-300) {
        return std::numeric_limits<double>::infinity();
    }
    return s(0) / smin;
}

MhavokWorkspace::MhavokWorkspace(const MultichannelSeries& series, int m, int r_cap) {
    series.validate();
    hankel_ = delay_embed(series, m);
    svd_ = thin_svd(hankel_);
    r_cap_ = std::min<int>({r_cap, static_cast<int>(svd_.s.size()), hankel_.cols()});
    if (r_cap_ < 1) {
        throw std::invalid_argument("MhavokWorkspace: no retainable modes");
    }
    dt_ = series.dt;
    channel_names_ = series.names;

    const Eigen::MatrixXd v = svd_.v.leftCols(r_cap_);
    vdot_ = differentiate(v, dt_);
    v_trim_ = v.middleRows(2, v.rows() - 4);
}

int MhavokWorkspace::numerical_rank(double tol) const {
    if (svd_.s.size() == 0 || svd_.s(0) <= 0.0) {
        return 0;
    }
    int rank = 0;
    while (rank < r_cap_ && svd_.s(rank) >= tol * svd_.s(0)) {
        ++rank;
    }
    return rank;
}

HavokModel MhavokWorkspace::fit_model(int r, double tau) const {
    if (r < 1 || r > r_cap_) {
        throw std::invalid_argument("fit_model: rank out of range");
    }
    const Eigen::MatrixXd v = v_trim_.leftCols(r);
    const Eigen::MatrixXd vdot = vdot_.leftCols(r);

    HavokModel model;
    model.r = r;
    model.tau = tau;
    model.dt = dt_;
    model.c = fit_linear_map(v, vdot);
    ModeClassification cls = classify_modes(v, vdot, model.c, tau);
    model.linear_modes = std::move(cls.linear);
    model.forcing_modes = std::move(cls.forcing);
    model.zero_variance_modes = std::move(cls.zero_variance);
    model.r2 = std::move(cls.r2);

    const int nc = model.n_linear();
    const int nf = model.n_forcing();
    if (nc == 0) {
        return model;  // nothing to regress; caller inspects n_linear()
    }
    Eigen::MatrixXd v_c(v.rows(), nc), vdot_c(v.rows(), nc), v_f(v.rows(), nf);
    for (int i = 0; i < nc; ++i) {
        v_c.col(i) = v.col(model.linear_modes[i]);
        vdot_c.col(i) = vdot.col(model.linear_modes[i]);
    }
    for (int i = 0; i < nf; ++i) {
        v_f.col(i) = v.col(model.forcing_modes[i]);
    }
    std::tie(model.a, model.b) = fit_forced_model(v_c, v_f, vdot_c);

    model.u_c.resize(svd_.u.rows(), nc);
    model.sigma_c.resize(nc);
    for (int i = 0; i < nc; ++i) {
        model.u_c.col(i) = svd_.u.col(model.linear_modes[i]);
        model.sigma_c(i) = svd_.s(model.linear_modes[i]);
    }
    return model;
}

Reconstruction MhavokWorkspace::reconstruct_from(const HavokModel& model) const {
    if (model.n_linear() == 0) {
        throw ClassificationError("reconstruct: model has no linear modes");
    }
    const int cols = hankel_.cols();
    const int nc = model.n_linear();
    const int nf = model.n_forcing();

    Eigen::MatrixXd u_forcing(cols, nf);
    Eigen::VectorXd x0(nc);
    const Eigen::MatrixXd v_full = svd_.v.leftCols(model.r);
    for (int i = 0; i < nf; ++i) {
        u_forcing.col(i) = v_full.col(model.forcing_modes[i]);
    }
    for (int i = 0; i < nc; ++i) {
        x0(i) = v_full(0, model.linear_modes[i]);
    }

    Reconstruction rec;
    rec.states = simulate_forced(model.a, model.b, u_forcing, x0, dt_, cols);
    rec.hankel = model.u_c * model.sigma_c.asDiagonal() * rec.states.transpose();
    rec.observables.t0 = 0.0;
    rec.observables.dt = dt_;
    rec.observables.names = channel_names_;
    rec.observables.values = rec.hankel.topRows(hankel_.q).transpose();
    return rec;
}

HavokFit fit_mhavok(const MultichannelSeries& series, int m, double tau, int r) {
    MhavokWorkspace ws(series, m, r);
    HavokFit fit;
    fit.model = ws.fit_model(r, tau);
    if (fit.model.n_linear() == 0) {
        throw ClassificationError("fit_mhavok: no linear modes at rank " + std::to_string(r));
    }
    fit.recon = ws.reconstruct_from(fit.model);
    return fit;
}

RankSweep select_optimal_rank(const MhavokWorkspace& ws, double tau, int r_max,
                              NoForcingPolicy policy) {
    const double inf = std::numeric_limits<double>::infinity();
    r_max = std::min({r_max, ws.max_rank(), ws.numerical_rank()});
    RankSweep sweep;
    int best_r = 0;
    double best_score = -inf;
    // Strictly-better comparison with a 1e-9 relative margin keeps the smallest
    // rank among ties.
    const auto better = [](double s, double b) {
        if (std::isinf(s) && std::isinf(b)) {
            return s > 0 && b < 0;
        }
        if (std::isinf(s)) {
            return s > 0;
        }
        if (std::isinf(b)) {
            return b < 0;
        }
        return s > b + 1e-9 * std::max({std::abs(s), std::abs(b), 1.0});
    };
    for (int r = 1; r <= r_max; ++r) {
        const HavokModel model = ws.fit_model(r, tau);
        if (model.n_linear() == 0) {
            continue;  // below r_min
        }
        RankRecord rec;
        rec.r = r;
        rec.n_linear = model.n_linear();
        rec.n_forcing = model.n_forcing();
        rec.cond_b = model.n_forcing() == 0 ? inf : condition_number(model.b);
        sweep.table.push_back(rec);

        double score = rec.cond_b;
        if (std::isinf(rec.cond_b) && policy == NoForcingPolicy::loses) {
            score = 0.0;  // below every admissible condition number (κ ≥ 1)
        }
        if (best_r == 0 || better(score, best_score)) {
            best_score = score;
            best_r = r;
        }
    }
    if (best_r == 0) {
        throw ClassificationError("select_optimal_rank: no rank produced a linear mode");
    }
    sweep.r_opt = best_r;
    return sweep;
}

RankSweep select_optimal_rank(const MultichannelSeries& series, int m, double tau,
                              int r_max, NoForcingPolicy policy) {
    MhavokWorkspace ws(series, m, r_max);
    return select_optimal_rank(ws, tau, r_max, policy);
}

} // namespace havoq
