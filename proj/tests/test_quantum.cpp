#include "havoq/bath.hpp"
#include "havoq/errors.hpp"
#include "havoq/lindblad.hpp"
#include "havoq/models.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace havoq;
using std::numbers::pi;

namespace {

int basis_index(const HilbertSpec& spec, int ix, int iy, int q = 0) {
    const int nq = spec.qubit ? 2 : 1;
    return (ix * spec.n_y + iy) * nq + q;
}

} // namespace

TEST_CASE("bose_einstein_occupation matches the distribution") {
    CHECK(bose_einstein_occupation(2.0 * pi, 2.0) == doctest::Approx(0.04516570536368412).epsilon(1e-12));
    // exp(omega/T) = 2 forces occupation 1
    CHECK(bose_einstein_occupation(3.7 * std::log(2.0), 3.7) == doctest::Approx(1.0).epsilon(1e-12));
    // monotone decreasing in omega
    CHECK(bose_einstein_occupation(pi, 2.0) > bose_einstein_occupation(2.0 * pi, 2.0));
    CHECK_THROWS_AS(bose_einstein_occupation(0.0, 2.0), std::domain_error);
    CHECK_THROWS_AS(bose_einstein_occupation(1.0, -1.0), std::domain_error);
}

TEST_CASE("ladder operators and embeddings") {
    const Operator a = annihilation(4);
    CHECK(a(0, 1).real() == doctest::Approx(1.0));
    CHECK(a(2, 3).real() == doctest::Approx(std::sqrt(3.0)));
    CHECK(a(3, 3) == complexd(0.0, 0.0));

    const HilbertSpec spec{3, 2, false};
    const OperatorSet ops = build_operators(spec);
    CHECK(ops.a_x.rows() == 6);
    // [a_x, a_x†] = I away from the truncation edge
    const Operator comm = ops.a_x * ops.ad_x - ops.ad_x * ops.a_x;
    CHECK(comm(basis_index(spec, 0, 0), basis_index(spec, 0, 0)).real() == doctest::Approx(1.0));
    CHECK(comm(basis_index(spec, 1, 1), basis_index(spec, 1, 1)).real() == doctest::Approx(1.0));
    // number operator conventions differ by one
    const Operator diff = ops.number_x(NumberOrdering::annihilation_first)
                        - ops.number_x(NumberOrdering::creation_first);
    CHECK(diff(basis_index(spec, 1, 0), basis_index(spec, 1, 0)).real() == doctest::Approx(1.0));
    CHECK_THROWS_AS(build_operators(HilbertSpec{1, 4, false}), std::invalid_argument);
}

TEST_CASE("build_qho_hamiltonian is diagonal with ladder eigenvalues") {
    const HilbertSpec spec{10, 10, false};
    const double wx = 2.0 * pi, wy = pi;
    const Operator h = build_qho_hamiltonian(wx, wy, spec);
    CHECK(hermiticity_defect(h) == 0.0);
    for (int ix : {0, 3, 9}) {
        for (int iy : {0, 2, 7}) {
            // ordering a a† gives n + 1 per mode
            CHECK(h(basis_index(spec, ix, iy), basis_index(spec, ix, iy)).real() ==
                  doctest::Approx(wx * (ix + 1) + wy * (iy + 1)).epsilon(1e-14));
        }
    }
    const Operator h2 = build_qho_hamiltonian(wx, wy, spec, NumberOrdering::creation_first);
    CHECK(h2(basis_index(spec, 3, 2), basis_index(spec, 3, 2)).real() ==
          doctest::Approx(wx * 3 + wy * 2).epsilon(1e-14));
    CHECK(build_qho_hamiltonian(0.0, 0.0, spec).norm() == 0.0);
}

TEST_CASE("build_kerr_hamiltonian eigenvalues") {
    const HilbertSpec spec{6, 6, false};
    const Operator h = build_kerr_hamiltonian(2.0, 3.0, 0.0, spec);
    // self-Kerr entry (χ/2) n (n−1), independent of the ordering flag
    CHECK(h(basis_index(spec, 2, 1), basis_index(spec, 2, 1)).real() == doctest::Approx(2.0));
    CHECK(h(basis_index(spec, 1, 1), basis_index(spec, 1, 1)).real() == doctest::Approx(0.0));
    CHECK(build_kerr_hamiltonian(0.0, 0.0, 0.0, spec).norm() == 0.0);

    const Operator h55 = build_kerr_hamiltonian(5.0, 5.0, 0.0, spec);
    CHECK(h55(basis_index(spec, 1, 1), basis_index(spec, 1, 1)).real() == doctest::Approx(0.0));

    // the cross term follows the number-ordering flag
    const Operator hc = build_kerr_hamiltonian(0.0, 0.0, 0.5, spec);
    CHECK(hc(basis_index(spec, 2, 3), basis_index(spec, 2, 3)).real() ==
          doctest::Approx(0.5 * 3.0 * 4.0));  // (n_x+1)(n_y+1)
    const Operator ht = build_kerr_hamiltonian(0.0, 0.0, 0.5, spec, NumberOrdering::creation_first);
    CHECK(ht(basis_index(spec, 2, 3), basis_index(spec, 2, 3)).real() ==
          doctest::Approx(0.5 * 2.0 * 3.0));
}

TEST_CASE("build_jc_hamiltonian couples the single-excitation pair") {
    const HilbertSpec spec{10, 10, true};
    const double g = 0.15;
    const Operator h = build_jc_hamiltonian(2.0 * pi, g, spec);
    CHECK(hermiticity_defect(h) < 1e-15);
    // ⟨1,g|H|0,e⟩ = g
    CHECK(h(basis_index(spec, 1, 0, 0), basis_index(spec, 0, 0, 1)).real() == doctest::Approx(g));

    // g = 0 commutes with the photon number
    const Operator h0 = build_jc_hamiltonian(2.0 * pi, 0.0, spec);
    const OperatorSet ops = build_operators(spec);
    const Operator num = ops.number_x(NumberOrdering::creation_first);
    CHECK((h0 * num - num * h0).norm() < 1e-12);

    CHECK_THROWS_AS(build_jc_hamiltonian(1.0, 0.1, HilbertSpec{10, 10, false}),
                    std::invalid_argument);
}

TEST_CASE("build_modulation_drive evaluates the cosine coefficient") {
    const HilbertSpec spec{4, 4, false};
    const double delta = 4.0, wf = pi / std::numbers::e;
    const DriveTerm drive = build_modulation_drive(delta, wf, spec);
    CHECK(drive.coefficient(0.0) == doctest::Approx(delta));
    CHECK(drive.coefficient(pi / (2.0 * wf)) == doctest::Approx(0.0).epsilon(1e-12));
    // the driven operator is the photon number as printed (a†a)
    CHECK(drive.op(basis_index(spec, 2, 0), basis_index(spec, 2, 0)).real() == doctest::Approx(2.0));
    CHECK_THROWS_AS(build_modulation_drive(1.0, 0.0, spec), std::domain_error);
}

TEST_CASE("build_jump_operators prefactors and variants") {
    const HilbertSpec spec{4, 4, false};
    const OperatorSet ops = build_operators(spec);
    BathSpec bath;
    bath.temperature = 2.0;
    bath.kappa = 0.1;
    bath.phi = 0.0;

    SUBCASE("closed system yields no jumps") {
        bath.kappa = 0.0;
        CHECK(build_jump_operators(bath, 2.0 * pi, pi, ops).empty());
    }

    SUBCASE("per-mode thermal jumps") {
        const auto jumps = build_jump_operators(bath, 2.0 * pi, pi, ops);
        REQUIRE(jumps.size() == 4);
        const double nbx = 0.04516570536368412;
        const double nby = 0.262434309411032;
        CHECK((jumps[0] - std::sqrt(0.1 * (nbx + 1.0)) * ops.a_x).norm() < 1e-12);
        CHECK((jumps[1] - std::sqrt(0.1 * nbx) * ops.ad_x).norm() < 1e-12);
        CHECK((jumps[2] - std::sqrt(0.1 * (nby + 1.0)) * ops.a_y).norm() < 1e-12);
        CHECK((jumps[3] - std::sqrt(0.1 * nby) * ops.ad_y).norm() < 1e-12);
    }

    SUBCASE("common-environment variant mixes the modes") {
        bath.common_environment = true;
        bath.phi = 0.3;
        const auto jumps = build_jump_operators(bath, 2.0 * pi, pi, ops);
        REQUIRE(jumps.size() == 4);
        const Operator mixed = ops.a_x + std::exp(complexd(0.0, 0.3)) * ops.a_y;
        const double nbx = 0.04516570536368412;
        CHECK((jumps[0] - std::sqrt(0.1 * (nbx + 1.0)) * mixed).norm() < 1e-12);
    }

    SUBCASE("qubit rates append relaxation and dephasing") {
        const HilbertSpec qspec{4, 4, true};
        const OperatorSet qops = build_operators(qspec);
        const auto jumps = build_jump_operators(bath, 2.0 * pi, pi, qops,
                                                QubitRates{0.1, 0.01});
        REQUIRE(jumps.size() == 6);
        CHECK((jumps[4] - std::sqrt(0.1) * qops.sm).norm() < 1e-12);
        CHECK((jumps[5] - std::sqrt(0.01) * qops.sz).norm() < 1e-12);
        CHECK_THROWS_AS(build_jump_operators(bath, 2.0 * pi, pi, qops, QubitRates{-0.1, 0.0}),
                        std::domain_error);
    }
}

TEST_CASE("coherent_state amplitudes and truncation guard") {
    const HilbertSpec spec{10, 10, false};
    SUBCASE("vacuum for alpha = 0") {
        const DensityMatrix rho = coherent_state(0.0, spec);
        CHECK(rho(0, 0).real() == doctest::Approx(1.0));
        CHECK(rho.trace().real() == doctest::Approx(1.0));
    }
    SUBCASE("alpha = 1 quadrature means") {
        const DensityMatrix rho = coherent_state(1.0, spec);
        const OperatorSet ops = build_operators(spec);
        const complexd x = ops.quad_x().cwiseProduct(rho.transpose()).sum();
        CHECK(x.real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
        CHECK(std::abs(rho.trace() - complexd(1.0, 0.0)) < 1e-14);
        const DensityCheck chk = check_density(rho);
        CHECK(chk.min_eigenvalue > -1e-12);
    }
    SUBCASE("insufficient truncation raises") {
        CHECK_THROWS_AS(coherent_state(1.5, HilbertSpec{4, 4, false}), TruncationError);
    }
    SUBCASE("qubit factor starts in the requested level") {
        const HilbertSpec qspec{10, 10, true};
        const DensityMatrix rho = coherent_state(1.0, qspec, false);
        const OperatorSet ops = build_operators(qspec);
        const complexd sz = ops.sz.cwiseProduct(rho.transpose()).sum();
        CHECK(sz.real() == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("evolve_lindblad: frozen state under zero generator") {
    const HilbertSpec spec{2, 2, false};
    LindbladModel model;
    model.hamiltonian = Operator::Zero(4, 4);
    const DensityMatrix rho0 = coherent_state(0.0, spec);
    const Trajectory traj = evolve_lindblad(model, rho0, 1.0, 0.1);
    REQUIRE(traj.size() == 11);
    CHECK((traj.frames.back() - rho0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("evolve_lindblad: closed-system coherent rotation") {
    // ⟨a_x(t)⟩ = α e^{−iω t} for the closed oscillator. Truncating at 12 keeps
    // the renormalization deficit of |⟨a⟩| below the comparison tolerance.
    const HilbertSpec spec{12, 12, false};
    const double wx = 2.0 * pi, wy = pi;
    LindbladModel model;
    model.hamiltonian = build_qho_hamiltonian(wx, wy, spec);
    const DensityMatrix rho0 = coherent_state(1.0, spec);
    const OperatorSet ops = build_operators(spec);

    const std::vector<ObservableSpec> obs{
        {"ax_re", ops.a_x, ObservableSpec::Part::real},
        {"ax_im", ops.a_x, ObservableSpec::Part::imag},
        {"h", model.hamiltonian, ObservableSpec::Part::real},
    };
    const double t_f = 5.0;
    const ObservedEvolution evo = evolve_observed(model, rho0, t_f, 0.01, obs);
    double max_err = 0.0;
    for (int k = 0; k < evo.series.samples(); ++k) {
        const double t = evo.series.time_at(k);
        const complexd expect = std::exp(complexd(0.0, -wx * t));
        const complexd got(evo.series.values(k, 0), evo.series.values(k, 1));
        max_err = std::max(max_err, std::abs(got - expect));
    }
    CHECK(max_err < 1e-6);
    // closed-system energy conservation
    const double h0 = evo.series.values(0, 2);
    for (int k = 0; k < evo.series.samples(); k += 50) {
        CHECK(std::abs(evo.series.values(k, 2) - h0) <= 1e-6 * std::abs(h0));
    }
    CHECK(evo.invariants.max_trace_error < 1e-12);
}

TEST_CASE("evolve_lindblad: damped quadratures follow the linear first-moment system") {
    // With per-mode thermal jumps each quadrature pair obeys
    // d/dt (x + ip) = (−κ/2 − iω)(x + ip).
    const HilbertSpec spec{10, 10, false};
    const double wx = 2.0 * pi, wy = pi, kappa = 0.1;
    LindbladModel model;
    model.hamiltonian = build_qho_hamiltonian(wx, wy, spec);
    BathSpec bath;
    bath.temperature = 2.0;
    bath.kappa = kappa;
    const OperatorSet ops = build_operators(spec);
    model.jumps = build_jump_operators(bath, wx, wy, ops);

    EvolveOptions opts;
    opts.layout = spec;
    const std::vector<ObservableSpec> obs{
        {"x", ops.quad_x(), ObservableSpec::Part::real},
        {"y", ops.quad_y(), ObservableSpec::Part::real},
        {"px", ops.mom_x(), ObservableSpec::Part::real},
        {"py", ops.mom_y(), ObservableSpec::Part::real},
    };
    const double t_f = 10.0;
    const ObservedEvolution evo = evolve_observed(model, coherent_state(1.0, spec), t_f, 0.01,
                                                  obs, opts);

    double ss = 0.0;
    const double x0 = std::sqrt(2.0);
    for (int k = 0; k < evo.series.samples(); ++k) {
        const double t = evo.series.time_at(k);
        const complexd ax = x0 * std::exp(complexd(-0.5 * kappa, -wx) * t);
        const complexd ay = x0 * std::exp(complexd(-0.5 * kappa, -wy) * t);
        ss += std::pow(evo.series.values(k, 0) - ax.real(), 2);
        ss += std::pow(evo.series.values(k, 1) - ay.real(), 2);
        ss += std::pow(evo.series.values(k, 2) - ax.imag(), 2);
        ss += std::pow(evo.series.values(k, 3) - ay.imag(), 2);
    }
    const double rms = std::sqrt(ss / (4.0 * evo.series.samples()));
    CHECK(rms <= 1e-4);

    CHECK(evo.invariants.max_trace_error <= 1e-8);
    CHECK(evo.invariants.max_hermiticity_error <= 1e-10);
    CHECK(evo.invariants.min_eigenvalue >= -1e-7);
    CHECK(evo.invariants.max_top_level_population < 1e-4);
}

TEST_CASE("evolve_lindblad: amplitude decay of the damped mode") {
    const HilbertSpec spec{10, 10, false};
    const double wx = 2.0 * pi, kappa = 0.1;
    LindbladModel model;
    model.hamiltonian = build_qho_hamiltonian(wx, pi, spec);
    BathSpec bath;
    bath.temperature = 2.0;
    bath.kappa = kappa;
    const OperatorSet ops = build_operators(spec);
    model.jumps = build_jump_operators(bath, wx, pi, ops);

    const std::vector<ObservableSpec> obs{
        {"ax_re", ops.a_x, ObservableSpec::Part::real},
        {"ax_im", ops.a_x, ObservableSpec::Part::imag},
    };
    const ObservedEvolution evo = evolve_observed(model, coherent_state(1.0, spec), 10.0, 0.01, obs);
    for (int k = 0; k < evo.series.samples(); k += 100) {
        const double t = evo.series.time_at(k);
        const double mag = std::hypot(evo.series.values(k, 0), evo.series.values(k, 1));
        CHECK(std::abs(mag - std::exp(-0.5 * kappa * t)) < 1e-4);
    }
}

TEST_CASE("expectation_series basics") {
    const HilbertSpec spec{3, 2, false};
    LindbladModel model;
    model.hamiltonian = build_qho_hamiltonian(1.0, 1.0, spec);
    const Trajectory traj = evolve_lindblad(model, coherent_state(0.0, spec), 0.5, 0.1);
    const Operator eye = Operator::Identity(6, 6);
    const Eigen::VectorXcd ones = expectation_series(traj, eye);
    for (int k = 0; k < traj.size(); ++k) {
        CHECK(std::abs(ones(k) - complexd(1.0, 0.0)) < 1e-12);
    }
    const OperatorSet ops = build_operators(spec);
    const Eigen::VectorXcd xs = expectation_series(traj, ops.quad_x());
    for (int k = 0; k < traj.size(); ++k) {
        CHECK(std::abs(xs(k)) < 1e-12);  // vacuum stays centered
    }
    CHECK_THROWS_AS(expectation_series(traj, Operator::Identity(4, 4)), std::invalid_argument);
}

TEST_CASE("steady_state_occupation") {
    const HilbertSpec spec{10, 10, false};
    const OperatorSet ops = build_operators(spec);

    SUBCASE("closed system conserves the photon number") {
        LindbladModel model;
        model.hamiltonian = build_qho_hamiltonian(2.0 * pi, pi, spec);
        const Trajectory traj = evolve_lindblad(model, coherent_state(1.0, spec), 2.0, 0.01);
        const double n = steady_state_occupation(
            traj, ops.number_x(NumberOrdering::creation_first), 0.25);
        CHECK(n == doctest::Approx(1.0).epsilon(1e-6));
        // tail_fraction = 1 averages the whole series, which is constant here
        const double n_all = steady_state_occupation(
            traj, ops.number_x(NumberOrdering::creation_first), 1.0);
        CHECK(n_all == doctest::Approx(n).epsilon(1e-9));
    }

    SUBCASE("thermal bath relaxes toward the Bose-Einstein occupation") {
        LindbladModel model;
        model.hamiltonian = build_qho_hamiltonian(2.0 * pi, pi, spec);
        BathSpec bath;
        bath.temperature = 2.0;
        bath.kappa = 0.1;
        model.jumps = build_jump_operators(bath, 2.0 * pi, pi, ops);
        const std::vector<ObservableSpec> obs{
            {"n_y", ops.number_y(NumberOrdering::creation_first), ObservableSpec::Part::real},
        };
        const ObservedEvolution evo = evolve_observed(model, coherent_state(1.0, spec),
                                                      50.0, 0.05, obs);
        const double tail = tail_mean(evo.series.channel("n_y"), 0.1);
        const double nbar = bose_einstein_occupation(pi, 2.0);
        CHECK(std::abs(tail - nbar) / nbar < 0.05);
    }
}

TEST_CASE("evolve_lindblad rejects bad inputs and diverging runs") {
    const HilbertSpec spec{2, 2, false};
    LindbladModel model;
    model.hamiltonian = Operator::Zero(4, 4);

    SUBCASE("dt must divide t_f") {
        CHECK_THROWS_AS(evolve_lindblad(model, coherent_state(0.0, spec), 1.0, 0.3),
                        std::invalid_argument);
    }
    SUBCASE("non-Hermitian Hamiltonian is rejected") {
        LindbladModel bad;
        bad.hamiltonian = Operator::Zero(4, 4);
        bad.hamiltonian(0, 1) = complexd(0.0, 1.0);
        CHECK_THROWS_AS(evolve_lindblad(bad, coherent_state(0.0, spec), 1.0, 0.1),
                        std::invalid_argument);
    }
    SUBCASE("unstable step reports the divergence") {
        // RK4 at |λ h| ≈ 30 diverges; refinements are disabled to keep it so.
        LindbladModel stiff;
        stiff.hamiltonian = build_qho_hamiltonian(3000.0, 3000.0, spec);
        EvolveOptions opts;
        opts.substeps = 1;
        opts.max_refinements = 0;
        opts.positivity_stride = 1;
        DensityMatrix rho0(4, 4);
        rho0.setZero();
        rho0(0, 0) = 0.5;
        rho0(3, 3) = 0.5;
        rho0(0, 3) = 0.49;
        rho0(3, 0) = 0.49;
        CHECK_THROWS_AS(evolve_lindblad(stiff, rho0, 5.0, 0.01, opts), IntegrationDivergedError);
    }
}
