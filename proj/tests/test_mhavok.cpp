#include "havoq/errors.hpp"
#include "havoq/mhavok.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace havoq;
using std::numbers::pi;

namespace {

MultichannelSeries make_series(const Eigen::MatrixXd& values, double dt = 0.01) {
    MultichannelSeries s;
    s.dt = dt;
    s.values = values;
    for (int c = 0; c < values.cols(); ++c) {
        s.names.push_back("c" + std::to_string(c));
    }
    return s;
}

// Samples of exp(G t) x0, via scaling-and-squaring of the exponential series.
Eigen::MatrixXd sample_linear_system(const Eigen::MatrixXd& g, const Eigen::VectorXd& x0,
                                     int n, double dt) {
    const auto expm = [](Eigen::MatrixXd m) {
        int s = 0;
        while (m.norm() > 0.5) {
            m *= 0.5;
            ++s;
        }
        Eigen::MatrixXd term = Eigen::MatrixXd::Identity(m.rows(), m.cols());
        Eigen::MatrixXd sum = term;
        for (int k = 1; k <= 16; ++k) {
            term = (term * m) / static_cast<double>(k);
            sum += term;
        }
        for (int i = 0; i < s; ++i) {
            sum = sum * sum;
        }
        return sum;
    };
    const Eigen::MatrixXd step = expm(g * dt);
    Eigen::MatrixXd out(n, g.rows());
    Eigen::VectorXd x = x0;
    for (int k = 0; k < n; ++k) {
        out.row(k) = x.transpose();
        x = step * x;
    }
    return out;
}

Eigen::MatrixXd damped_block(double kappa_half, double omega) {
    Eigen::MatrixXd g(2, 2);
    g << -kappa_half, omega,
         -omega, -kappa_half;
    return g;
}

} // namespace

TEST_CASE("thin_svd factorization and degenerate ranks") {
    SUBCASE("constant channel gives a single singular value") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Ones(200, 1);
        const BlockHankel h = delay_embed(make_series(v), 10);
        const SvdBundle svd = thin_svd(h);
        CHECK(svd.s(0) > 0.0);
        for (int i = 1; i < svd.s.size(); ++i) {
            CHECK(svd.s(i) <= 1e-12 * svd.s(0));
        }
    }
    SUBCASE("noiseless sinusoid spans a two-dimensional delay subspace") {
        Eigen::MatrixXd v(400, 1);
        for (int k = 0; k < 400; ++k) {
            v(k, 0) = std::sin(2.0 * pi * 0.01 * k);
        }
        const SvdBundle svd = thin_svd(delay_embed(make_series(v), 20));
        int above = 0;
        for (int i = 0; i < svd.s.size(); ++i) {
            if (svd.s(i) > 1e-10 * svd.s(0)) {
                ++above;
            }
        }
        CHECK(above == 2);
    }
    SUBCASE("orthonormal factors and tiny residual") {
        std::mt19937 rng(3);
        std::normal_distribution<double> dist;
        Eigen::MatrixXd v(500, 3);
        for (int i = 0; i < v.rows(); ++i) {
            for (int j = 0; j < v.cols(); ++j) {
                v(i, j) = dist(rng);
            }
        }
        const BlockHankel h = delay_embed(make_series(v), 12);
        const SvdBundle svd = thin_svd(h);
        const int l = static_cast<int>(svd.s.size());
        CHECK((svd.u.transpose() * svd.u - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff()
              < 1e-10);
        CHECK((svd.v.transpose() * svd.v - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff()
              < 1e-10);
        const Eigen::MatrixXd rebuilt = svd.u * svd.s.asDiagonal() * svd.v.transpose();
        CHECK((rebuilt - h.mat).norm() / h.mat.norm() <= 1e-10);
        for (int i = 1; i < svd.s.size(); ++i) {
            CHECK(svd.s(i) <= svd.s(i - 1));
        }
    }
}

TEST_CASE("differentiate: interior fourth-order differences") {
    const double dt = 0.01;
    SUBCASE("linear ramp gives exact ones") {
        Eigen::MatrixXd v(50, 1);
        for (int k = 0; k < 50; ++k) {
            v(k, 0) = dt * k;
        }
        const Eigen::MatrixXd vd = differentiate(v, dt);
        REQUIRE(vd.rows() == 46);
        for (int k = 0; k < vd.rows(); ++k) {
            CHECK(vd(k, 0) == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("sinusoid meets the truncation bound") {
        // max error is |f⁽⁵⁾| h⁴/30 = (2π)⁵ · 1e-8 / 30 ≈ 3.27e-6
        Eigen::MatrixXd v(1000, 1);
        for (int k = 0; k < 1000; ++k) {
            v(k, 0) = std::sin(2.0 * pi * dt * k);
        }
        const Eigen::MatrixXd vd = differentiate(v, dt);
        double max_err = 0.0;
        for (int k = 0; k < vd.rows(); ++k) {
            const double t = dt * (k + 2);
            max_err = std::max(max_err, std::abs(vd(k, 0) - 2.0 * pi * std::cos(2.0 * pi * t)));
        }
        CHECK(max_err <= 3.3e-6);
        CHECK(max_err >= 1e-7);  // the bound is tight, not vacuous
    }
    SUBCASE("constant column maps to zero") {
        Eigen::MatrixXd v = Eigen::MatrixXd::Constant(10, 2, 4.2);
        CHECK(differentiate(v, dt).cwiseAbs().maxCoeff() < 1e-13);
    }
    SUBCASE("needs five rows") {
        CHECK_THROWS_AS(differentiate(Eigen::MatrixXd::Ones(4, 1), dt), std::invalid_argument);
    }
}

TEST_CASE("fit_linear_map recovers generators") {
    std::mt19937 rng(11);
    std::normal_distribution<double> dist;

    SUBCASE("identity when derivatives equal values") {
        Eigen::MatrixXd v(60, 3);
        for (int i = 0; i < v.rows(); ++i) {
            for (int j = 0; j < v.cols(); ++j) {
                v(i, j) = dist(rng);
            }
        }
        const Eigen::MatrixXd c = fit_linear_map(v, v);
        CHECK((c - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("harmonic generator from analytic derivatives") {
        const double w = 2.0;
        Eigen::MatrixXd v(500, 2), vd(500, 2);
        for (int k = 0; k < 500; ++k) {
            const double t = 0.01 * k;
            v(k, 0) = std::cos(w * t);
            v(k, 1) = std::sin(w * t);
            vd(k, 0) = -w * std::sin(w * t);
            vd(k, 1) = w * std::cos(w * t);
        }
        const Eigen::MatrixXd c = fit_linear_map(v, vd);
        Eigen::MatrixXd want(2, 2);
        want << 0.0, -w,
                w, 0.0;
        CHECK((c - want).cwiseAbs().maxCoeff() < 1e-6);
        // least-squares residual is orthogonal to the regressors
        const Eigen::MatrixXd resid = vd - v * c.transpose();
        CHECK((v.transpose() * resid).cwiseAbs().maxCoeff() <= 1e-8 * vd.norm());
    }
    SUBCASE("zero derivatives give a zero map") {
        Eigen::MatrixXd v(30, 2);
        for (int i = 0; i < v.rows(); ++i) {
            for (int j = 0; j < v.cols(); ++j) {
                v(i, j) = dist(rng);
            }
        }
        CHECK(fit_linear_map(v, Eigen::MatrixXd::Zero(30, 2)).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("classify_modes thresholds and degenerate columns") {
    Eigen::MatrixXd v(200, 2), vd(200, 2);
    for (int k = 0; k < 200; ++k) {
        const double t = 0.01 * k;
        v(k, 0) = std::cos(t);
        v(k, 1) = std::sin(t);
        vd(k, 0) = -std::sin(t);
        vd(k, 1) = std::cos(t);
    }
    const Eigen::MatrixXd c = fit_linear_map(v, vd);

    SUBCASE("exactly linear modes all pass") {
        const ModeClassification cls = classify_modes(v, vd, c, 0.95);
        CHECK(cls.linear.size() == 2);
        CHECK(cls.forcing.empty());
        CHECK(cls.r2(0) == doctest::Approx(1.0).epsilon(1e-10));
    }
    SUBCASE("zero-variance derivative column is flagged as forcing") {
        Eigen::MatrixXd v3(200, 3), vd3(200, 3);
        v3.leftCols(2) = v;
        vd3.leftCols(2) = vd;
        v3.col(2).setLinSpaced(200, 0.0, 1.0);
        vd3.col(2).setConstant(0.7);  // nonzero mean, zero variance
        const Eigen::MatrixXd c3 = fit_linear_map(v3, vd3);
        const ModeClassification cls = classify_modes(v3, vd3, c3, 0.95);
        REQUIRE(cls.zero_variance.size() == 1);
        CHECK(cls.zero_variance[0] == 2);
        CHECK(std::find(cls.forcing.begin(), cls.forcing.end(), 2) != cls.forcing.end());
    }
    SUBCASE("tau bounds are enforced") {
        CHECK_THROWS_AS(classify_modes(v, vd, c, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(classify_modes(v, vd, c, 1.0), std::invalid_argument);
    }
}

TEST_CASE("fit_forced_model consistency") {
    SUBCASE("empty forcing reduces to the unforced regression") {
        Eigen::MatrixXd v(300, 2), vd(300, 2);
        for (int k = 0; k < 300; ++k) {
            const double t = 0.01 * k;
            v(k, 0) = std::cos(3.0 * t);
            v(k, 1) = std::sin(3.0 * t);
            vd(k, 0) = -3.0 * std::sin(3.0 * t);
            vd(k, 1) = 3.0 * std::cos(3.0 * t);
        }
        const auto [a, b] = fit_forced_model(v, Eigen::MatrixXd(300, 0), vd);
        CHECK(b.cols() == 0);
        CHECK((a - fit_linear_map(v, vd)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("damped rotation generator is recovered") {
        const Eigen::MatrixXd g = damped_block(0.05, 2.0 * pi);
        Eigen::VectorXd x0(2);
        x0 << 1.0, 0.0;
        const Eigen::MatrixXd v = sample_linear_system(g, x0, 2000, 0.01);
        const Eigen::MatrixXd vd = v * g.transpose();  // analytic derivatives
        const auto [a, b] = fit_forced_model(v, Eigen::MatrixXd(2000, 0), vd);
        CHECK((a - g).cwiseAbs().maxCoeff() < 1e-6);
        (void)b;
    }
}

TEST_CASE("simulate_forced integrates the reduced model") {
    SUBCASE("zero dynamics hold the state") {
        const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2, 2);
        Eigen::VectorXd x0(2);
        x0 << 0.3, -0.4;
        const Eigen::MatrixXd x = simulate_forced(a, Eigen::MatrixXd(2, 0),
                                                  Eigen::MatrixXd(100, 0), x0, 0.01, 100);
        CHECK((x.row(99).transpose() - x0).cwiseAbs().maxCoeff() < 1e-15);
    }
    SUBCASE("circular trajectory drift stays tiny") {
        const Eigen::MatrixXd a = damped_block(0.0, pi);
        Eigen::VectorXd x0(2);
        x0 << 1.0, 0.0;
        const int n = 5001;
        const Eigen::MatrixXd x = simulate_forced(a, Eigen::MatrixXd(2, 0),
                                                  Eigen::MatrixXd(n, 0), x0, 0.01, n);
        double max_drift = 0.0;
        for (int k = 0; k < n; ++k) {
            max_drift = std::max(max_drift, std::abs(x.row(k).norm() - 1.0));
        }
        CHECK(max_drift <= 1e-6);
    }
    SUBCASE("linear forcing interpolation matches a known response") {
        // ẋ = u(t) with u linear in t integrates exactly under RK4 stages
        const Eigen::MatrixXd a = Eigen::MatrixXd::Zero(1, 1);
        Eigen::MatrixXd b(1, 1);
        b << 1.0;
        const int n = 101;
        Eigen::MatrixXd u(n, 1);
        for (int k = 0; k < n; ++k) {
            u(k, 0) = 2.0 * (0.01 * k);
        }
        Eigen::VectorXd x0(1);
        x0 << 0.0;
        const Eigen::MatrixXd x = simulate_forced(a, b, u, x0, 0.01, n);
        CHECK(x(n - 1, 0) == doctest::Approx(1.0).epsilon(1e-10));  // ∫ 2t dt over [0, 1]
    }
    SUBCASE("divergence raises") {
        Eigen::MatrixXd a(1, 1);
        a << 2000.0;
        Eigen::VectorXd x0(1);
        x0 << 1.0;
        CHECK_THROWS_AS(simulate_forced(a, Eigen::MatrixXd(1, 0), Eigen::MatrixXd(500, 0),
                                        x0, 0.01, 500),
                        IntegrationDivergedError);
    }
}

TEST_CASE("condition_number") {
    CHECK(condition_number(Eigen::MatrixXd::Identity(3, 3)) == doctest::Approx(1.0));
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4.0;
    d(1, 1) = 2.0;
    CHECK(condition_number(d) == doctest::Approx(2.0));
    Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
    singular(0, 0) = 1.0;
    CHECK(std::isinf(condition_number(singular)));
    CHECK_THROWS_AS(condition_number(Eigen::MatrixXd(0, 0)), std::invalid_argument);
}

TEST_CASE("reconstruct produces aligned observables") {
    std::mt19937 rng(5);
    std::normal_distribution<double> dist;
    Eigen::MatrixXd v(400, 2);
    for (int k = 0; k < 400; ++k) {
        const double t = 0.01 * k;
        v(k, 0) = std::cos(2.0 * t) + 0.1 * dist(rng);
        v(k, 1) = std::sin(5.0 * t);
    }
    const MultichannelSeries series = make_series(v);
    MhavokWorkspace ws(series, 12, 6);
    const HavokModel model = ws.fit_model(6, 0.95);
    REQUIRE(model.n_linear() > 0);
    const Reconstruction rec = ws.reconstruct_from(model);
    CHECK(rec.observables.samples() == ws.hankel().cols());
    CHECK(rec.observables.channels() == 2);
    CHECK(rec.hankel.rows() == ws.hankel().mat.rows());
}

TEST_CASE("full pipeline recovers a known linear spectrum") {
    // Two damped rotation blocks sampled exactly; the eigenvalues of the
    // retrieved A must match the generator's spectrum.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g.block(0, 0, 2, 2) = damped_block(0.05, 2.0 * pi);
    g.block(2, 2, 2, 2) = damped_block(0.05, pi);
    Eigen::VectorXd x0(4);
    x0 << 1.0, 0.0, 1.0, 0.0;
    const Eigen::MatrixXd v = sample_linear_system(g, x0, 2001, 0.01);
    const MultichannelSeries series = make_series(v);

    const HavokFit fit = fit_mhavok(series, 50, 0.95, 4);
    CHECK(fit.model.n_linear() == 4);
    CHECK(fit.model.n_forcing() == 0);
    CHECK(fit.model.b.cols() == 0);

    Eigen::VectorXcd lam_a = Eigen::EigenSolver<Eigen::MatrixXd>(fit.model.a).eigenvalues();
    Eigen::VectorXcd lam_g = Eigen::EigenSolver<Eigen::MatrixXd>(g).eigenvalues();
    const auto less = [](const std::complex<double>& p, const std::complex<double>& q) {
        return std::make_pair(p.imag(), p.real()) < std::make_pair(q.imag(), q.real());
    };
    std::sort(lam_a.data(), lam_a.data() + 4, less);
    std::sort(lam_g.data(), lam_g.data() + 4, less);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i) {
        worst = std::max(worst, std::abs(lam_a(i) - lam_g(i)));
    }
    CHECK(worst <= 1e-4 * g.norm());

    // the reconstruction replays the training series
    double rms = (fit.recon.observables.values
                  - v.topRows(fit.recon.observables.samples())).norm();
    rms /= std::sqrt(static_cast<double>(fit.recon.observables.samples()) * 4);
    CHECK(rms < 1e-3);
}

TEST_CASE("select_optimal_rank on clean linear data") {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(4, 4);
    g.block(0, 0, 2, 2) = damped_block(0.05, 2.0 * pi);
    g.block(2, 2, 2, 2) = damped_block(0.05, pi);
    Eigen::VectorXd x0(4);
    x0 << 1.0, 0.0, 1.0, 0.0;
    const Eigen::MatrixXd v = sample_linear_system(g, x0, 2001, 0.01);
    const MultichannelSeries series = make_series(v);

    const RankSweep sweep = select_optimal_rank(series, 50, 0.95, 12);
    CHECK(sweep.r_opt == 4);
    REQUIRE_FALSE(sweep.table.empty());
    for (const auto& rec : sweep.table) {
        if (rec.n_forcing > 0) {
            CHECK(rec.cond_b >= 1.0);
        }
    }

    // constant input has no linear modes at any rank
    Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(500, 1);
    CHECK_THROWS_AS(select_optimal_rank(make_series(flat), 10, 0.95, 8), ClassificationError);
}

TEST_CASE("fit_mhavok input validation") {
    Eigen::MatrixXd tiny = Eigen::MatrixXd::Ones(3, 1);
    CHECK_THROWS_AS(fit_mhavok(make_series(tiny), 100, 0.95, 4), std::invalid_argument);
}
