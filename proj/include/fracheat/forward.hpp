#pragma once

#include "fracheat/grid.hpp"
#include "fracheat/riesz.hpp"
#include "fracheat/spd.hpp"

#include <span>

namespace fracheat {

/// Modal CN growth factor g(mu) = (1 - mu/2) / (1 + mu/2).
double amplification_factor(double mu);

/// L = I + (tau/2) A (solved through StepSolver) and R = I - (tau/2) A (applied).
/// Both are polynomials in A, so they commute with it.
class StepOperators {
public:
    StepOperators(RieszOperator a, double tau, SolverKind kind = SolverKind::automatic,
                  double cg_tol = 1e-12);

    const RieszOperator& riesz() const { return a_; }
    double tau() const { return tau_; }

    Vector apply_r(const Vector& v) const;
    Vector solve_l(const Vector& b) const { return solver_.solve(b); }

private:
    RieszOperator a_;
    double tau_;
    StepSolver solver_;
};

/// One CN step: solves L U^{n+1} = R U^n + tau r_mid F_mid.
Vector cn_step(const StepOperators& ops, const Vector& u_n, double r_mid, const Vector& f_mid);

/// Marches U^0 = phi through M CN steps with r^{n+1/2} = r_mid[n] and
/// F^{n+1/2} = forcing(t^{n+1/2}).
Trajectory run_forward(const StepOperators& ops, const Grid& grid, const Vector& phi,
                       const ForcingField& forcing, std::span<const double> r_mid);

/// Same as above with r evaluated at the midpoints t^{n+1/2}.
Trajectory run_forward(const StepOperators& ops, const Grid& grid, const Vector& phi,
                       const ForcingField& forcing, const ScalarFunction& r);

/// r(t) sampled at t^{n+1/2}, n = 0..M-1.
CoefficientSeries sample_midpoints(const Grid& grid, const ScalarFunction& r);

/// ||U^{n+1}||^2 + 2 tau ||U^{n+1/2}||_A^2 - ||U^n||^2; zero for a homogeneous CN step.
double energy_identity_residual(const RieszOperator& a, const Vector& u_n, const Vector& u_np1,
                                double tau);

/// Per-level slacks of the discrete stability bounds along a forward run.
/// Entry n of each slack vector is (right-hand side - left-hand side) at level n,
/// so nonnegative values mean the bound holds. Entry 0 is always zero.
struct StabilityReport {
    /// Residual of the forced energy identity per step (length M).
    Vector identity_residuals;
    /// ||U^0|| + sum tau |r| ||F|| - ||U^n||.
    Vector l2_slack;
    /// ||U^0||^2 + sum tau |r|^2 ||F||_{A^-1}^2 - ||U^n||^2 - sum tau ||U^{k+1/2}||_A^2.
    Vector energy_slack;

    double min_l2_slack() const;
    double min_energy_slack() const;
    bool holds(double tolerance) const;
};

StabilityReport stability_bounds(const Trajectory& trajectory, std::span<const double> r_mid,
                                 const ForcingField& forcing, const RieszOperator& a,
                                 const SpdFactorization& a_factor, const Grid& grid);

/// Discrete Duhamel reference at T using the eigenpairs of A:
/// U(T) = sum_k [<phi,q_k> e^{-lambda_k T} + int_0^T <F(t),q_k> r(t) e^{-lambda_k (T-t)} dt] q_k,
/// with the time integral by composite Simpson on `substeps` intervals.
Vector spectral_duhamel_oracle(const SpectralDecomposition& decomp, const Vector& phi,
                               const ScalarFunction& r, const ForcingField& forcing,
                               const Grid& grid, int substeps);

}  // namespace fracheat
