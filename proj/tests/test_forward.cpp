#include "fracheat/forward.hpp"
#include "fracheat/manufactured.hpp"

#include "doctest.h"

#include <cmath>
#include <vector>

using namespace fracheat;

namespace {

ForcingField zero_forcing(int n) {
    return [n](double) { return Vector(Vector::Zero(n)); };
}

const ScalarFunction zero_r = [](double) { return 0.0; };

}  // namespace

TEST_CASE("amplification factor") {
    CHECK(amplification_factor(0.0) == 1.0);
    CHECK(amplification_factor(2.0) == 0.0);
    CHECK(amplification_factor(1e12) == doctest::Approx(-1.0));
}

TEST_CASE("cn_step on zero data stays zero") {
    const auto g = Grid::make(1.0, 1.0, 20, 10, 0.5);
    const StepOperators ops(assemble(g), g.tau());
    const Vector z = Vector::Zero(19);
    CHECK(cn_step(ops, z, 1.0, z).norm() == 0.0);
    CHECK_THROWS_AS(cn_step(ops, Vector::Zero(3), 1.0, z), std::invalid_argument);
}

TEST_CASE("cn_step is exact on eigenvectors") {
    const auto g = Grid::make(1.0, 1.0, 16, 1, 0.5);
    const auto a = assemble(g);
    const auto d = eigendecompose(a.dense());
    for (double tau : {1e-3, 1.0, 1e3}) {
        const StepOperators ops(a, tau);
        for (int k = 0; k < d.size(); ++k) {
            const Vector q = d.eigenvectors.col(k);
            const double gk = amplification_factor(tau * d.eigenvalues[k]);
            CHECK(std::abs(gk) <= 1.0);
            CHECK((cn_step(ops, q, 0.0, Vector::Zero(15)) - gk * q).norm() <= 1e-10);
        }
    }
}

TEST_CASE("energy identity residual") {
    const auto g = Grid::make(1.0, 1.0, 40, 40, 0.5);
    const auto a = assemble(g);
    const StepOperators ops(a, g.tau());
    const Vector z = Vector::Zero(39);
    CHECK(energy_identity_residual(a, z, z, g.tau()) == 0.0);

    const Vector u0 = g.sample([](double x) { return std::sin(M_PI * x) + x * (1 - x); });
    const Vector u1 = cn_step(ops, u0, 0.0, z);
    CHECK(std::abs(energy_identity_residual(a, u0, u1, g.tau())) <= 1e-10 * u0.squaredNorm());

    // A frozen state is not a CN step: the residual is the dissipation 2 tau ||U||_A^2.
    const double expected = 2.0 * g.tau() * u0.dot(a.apply(u0));
    CHECK(energy_identity_residual(a, u0, u0, g.tau()) == doctest::Approx(expected));
    CHECK(expected > 0.0);
}

TEST_CASE("run_forward trajectory shape and homogeneous behaviour") {
    const auto g = Grid::make(1.0, 1.0, 16, 12, 0.5);
    const auto a = assemble(g);
    const StepOperators ops(a, g.tau());

    SUBCASE("zero data gives a zero trajectory") {
        const auto traj = run_forward(ops, g, Vector::Zero(15), zero_forcing(15), zero_r);
        CHECK(traj.size() == 13);
        for (const auto& u : traj.states) {
            CHECK(u.norm() == 0.0);
        }
    }
    SUBCASE("eigenvector initial data decays by g^n") {
        const auto d = eigendecompose(a.dense());
        const Vector q = d.eigenvectors.col(3);
        const double gk = amplification_factor(g.tau() * d.eigenvalues[3]);
        const auto traj = run_forward(ops, g, q, zero_forcing(15), zero_r);
        for (int n = 0; n <= 12; ++n) {
            CHECK((traj.states[n] - std::pow(gk, n) * q).norm() <= 1e-10);
        }
    }
    SUBCASE("coefficient series length is checked") {
        std::vector<double> r(5, 1.0);
        CHECK_THROWS_AS(run_forward(ops, g, Vector::Zero(15), zero_forcing(15), r),
                        std::invalid_argument);
    }
}

TEST_CASE("homogeneous runs never increase the L2 norm for any tau") {
    for (double tau : {1e-3, 1e-1, 10.0}) {
        const int M = 20;
        const auto g = Grid::make(1.0, tau * M, 32, M, 0.5);
        const auto a = assemble(g);
        const StepOperators ops(a, g.tau());
        const Vector phi = g.sample([](double x) { return x * x * (1.0 - x) * 7.0; });
        const auto traj = run_forward(ops, g, phi, zero_forcing(31), zero_r);
        for (int n = 0; n < M; ++n) {
            CHECK(traj.states[n + 1].norm() <= traj.states[n].norm() * (1.0 + 1e-14));
            CHECK(std::abs(energy_identity_residual(a, traj.states[n], traj.states[n + 1],
                                                    g.tau())) <= 1e-10 * phi.squaredNorm());
        }
    }
}

TEST_CASE("example 1 forward run with exact r matches u at T") {
    const auto g = Grid::make(1.0, 1.0, 100, 100, 0.5);
    const auto mc = build_manufactured(ExampleId::example1, g);
    const StepOperators ops(assemble(g), g.tau());
    const auto traj = run_forward(ops, g, mc.data.phi, mc.data.forcing, mc.problem.r_exact);
    const Vector exact = mc.problem.u_nodal(g, 1.0);
    CHECK((traj.final_state() - exact).cwiseAbs().maxCoeff() <= 1e-4);
}

TEST_CASE("stability bounds along forward runs") {
    const auto g = Grid::make(1.0, 1.0, 100, 100, 0.5);
    const auto a = assemble(g);
    const auto fa = cholesky(a.dense());
    const StepOperators ops(a, g.tau());
    const auto mc = build_manufactured(ExampleId::example1, g);
    const auto r = sample_midpoints(g, mc.problem.r_exact);
    const std::span<const double> r_span(r.values.data(), r.values.size());

    SUBCASE("example 1 satisfies both bounds") {
        const auto traj = run_forward(ops, g, mc.data.phi, mc.data.forcing, r_span);
        const auto rep = stability_bounds(traj, r_span, mc.data.forcing, a, fa, g);
        CHECK(rep.holds(0.0));
        CHECK(rep.identity_residuals.cwiseAbs().maxCoeff() <= 1e-10 * mc.data.phi.squaredNorm());
    }
    SUBCASE("scaling the forcing scales the forcing part of the L2 bound") {
        const ForcingField f10 = [&](double t) { return Vector(10.0 * mc.data.forcing(t)); };
        const auto t1 = run_forward(ops, g, mc.data.phi, mc.data.forcing, r_span);
        const auto t10 = run_forward(ops, g, mc.data.phi, f10, r_span);
        const auto rep1 = stability_bounds(t1, r_span, mc.data.forcing, a, fa, g);
        const auto rep10 = stability_bounds(t10, r_span, f10, a, fa, g);
        const double u0 = mc.data.phi.norm();
        const double rhs1 = rep1.l2_slack[100] + t1.final_state().norm() - u0;
        const double rhs10 = rep10.l2_slack[100] + t10.final_state().norm() - u0;
        CHECK(rhs10 == doctest::Approx(10.0 * rhs1).epsilon(1e-12));
        CHECK(rep10.holds(0.0));
    }
    SUBCASE("homogeneous run is monotone") {
        const auto traj = run_forward(ops, g, mc.data.phi, zero_forcing(99), r_span);
        const auto rep = stability_bounds(traj, r_span, zero_forcing(99), a, fa, g);
        CHECK(rep.holds(1e-12));
        for (int n = 0; n < 100; ++n) {
            CHECK(traj.states[n + 1].norm() <= traj.states[n].norm());
        }
    }
}

TEST_CASE("spectral Duhamel oracle") {
    const auto g0 = Grid::make(1.0, 1.0, 32, 8, 0.5);
    const auto a = assemble(g0);
    const auto d = eigendecompose(a.dense());

    SUBCASE("pure decay of a single mode") {
        const double lambda1 = d.eigenvalues[0];
        const auto g = Grid::make(1.0, 1.0 / lambda1, 32, 8, 0.5);
        const Vector q1 = d.eigenvectors.col(0);
        const Vector u = spectral_duhamel_oracle(d, q1, zero_r, zero_forcing(31), g, 32);
        CHECK((u - std::exp(-1.0) * q1).norm() <= 1e-13);
    }
    SUBCASE("pure decay of a general profile") {
        const Vector phi = g0.sample([](double x) { return x * (1.0 - x); });
        const Vector u = spectral_duhamel_oracle(d, phi, zero_r, zero_forcing(31), g0, 32);
        Vector expected = Vector::Zero(31);
        for (int k = 0; k < 31; ++k) {
            expected += d.eigenvectors.col(k).dot(phi) * std::exp(-d.eigenvalues[k]) *
                        d.eigenvectors.col(k);
        }
        CHECK((u - expected).norm() <= 1e-14);
    }
    SUBCASE("discrete-manufactured data reproduce the nodal exact solution") {
        const auto mc = build_manufactured(ExampleId::example1, g0);
        const Vector u = spectral_duhamel_oracle(d, mc.data.phi, mc.problem.r_exact,
                                                 mc.data.forcing, g0, 4096);
        CHECK((u - mc.problem.u_nodal(g0, 1.0)).cwiseAbs().maxCoeff() <= 1e-8);
    }
    SUBCASE("CN converges to the oracle at second order") {
        const auto mc0 = build_manufactured(ExampleId::example1, g0);
        const Vector ref = spectral_duhamel_oracle(d, mc0.data.phi, mc0.problem.r_exact,
                                                   mc0.data.forcing, g0, 8192);
        std::vector<double> gaps;
        for (int M : {20, 40, 80}) {
            const auto g = Grid::make(1.0, 1.0, 32, M, 0.5);
            const auto mc = build_manufactured(ExampleId::example1, g);
            const StepOperators ops(a, g.tau());
            const auto traj = run_forward(ops, g, mc.data.phi, mc.data.forcing, mc.problem.r_exact);
            gaps.push_back((traj.final_state() - ref).cwiseAbs().maxCoeff());
        }
        for (std::size_t i = 1; i < gaps.size(); ++i) {
            CHECK(std::log2(gaps[i - 1] / gaps[i]) == doctest::Approx(2.0).epsilon(0.1));
        }
    }
    SUBCASE("argument checks") {
        CHECK_THROWS_AS(
            spectral_duhamel_oracle(SpectralDecomposition{}, Vector(), zero_r, zero_forcing(0), g0, 8),
            std::invalid_argument);
    }
}
