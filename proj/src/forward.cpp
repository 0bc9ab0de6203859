#include "fracheat/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fracheat {

double amplification_factor(double mu) {
    return (1.0 - 0.5 * mu) / (1.0 + 0.5 * mu);
}

StepOperators::StepOperators(RieszOperator a, double tau, SolverKind kind, double cg_tol)
    : a_(std::move(a)), tau_(tau), solver_(a_, tau, kind, cg_tol) {}

Vector StepOperators::apply_r(const Vector& v) const {
    return v - 0.5 * tau_ * a_.apply(v);
}

Vector cn_step(const StepOperators& ops, const Vector& u_n, double r_mid, const Vector& f_mid) {
    if (u_n.size() != ops.riesz().size() || f_mid.size() != ops.riesz().size()) {
        throw std::invalid_argument("cn_step: vector length does not match operator size");
    }
    if (!std::isfinite(r_mid)) {
        throw std::invalid_argument("cn_step: non-finite coefficient");
    }
    Vector rhs = ops.apply_r(u_n);
    rhs += ops.tau() * r_mid * f_mid;
    return ops.solve_l(rhs);
}

Trajectory run_forward(const StepOperators& ops, const Grid& grid, const Vector& phi,
                       const ForcingField& forcing, std::span<const double> r_mid) {
    const int m = grid.time_steps();
    if (static_cast<int>(r_mid.size()) != m) {
        throw std::invalid_argument("run_forward: expected " + std::to_string(m) +
                                    " midpoint coefficients");
    }
    Trajectory traj;
    traj.states.reserve(m + 1);
    traj.states.push_back(phi);
    for (int n = 0; n < m; ++n) {
        traj.states.push_back(cn_step(ops, traj.states.back(), r_mid[n], forcing(grid.t_mid(n))));
    }
    return traj;
}

CoefficientSeries sample_midpoints(const Grid& grid, const ScalarFunction& r) {
    CoefficientSeries out{Vector(grid.time_steps())};
    for (int n = 0; n < grid.time_steps(); ++n) {
        out.values[n] = r(grid.t_mid(n));
    }
    return out;
}

Trajectory run_forward(const StepOperators& ops, const Grid& grid, const Vector& phi,
                       const ForcingField& forcing, const ScalarFunction& r) {
    const auto series = sample_midpoints(grid, r);
    return run_forward(ops, grid, phi, forcing,
                       std::span<const double>(series.values.data(), series.values.size()));
}

double energy_identity_residual(const RieszOperator& a, const Vector& u_n, const Vector& u_np1,
                                double tau) {
    const Vector mid = 0.5 * (u_n + u_np1);
    return u_np1.squaredNorm() + 2.0 * tau * mid.dot(a.apply(mid)) - u_n.squaredNorm();
}

double StabilityReport::min_l2_slack() const {
    return l2_slack.size() == 0 ? 0.0 : l2_slack.minCoeff();
}

double StabilityReport::min_energy_slack() const {
    return energy_slack.size() == 0 ? 0.0 : energy_slack.minCoeff();
}

bool StabilityReport::holds(double tolerance) const {
    return min_l2_slack() >= -tolerance && min_energy_slack() >= -tolerance;
}

StabilityReport stability_bounds(const Trajectory& trajectory, std::span<const double> r_mid,
                                 const ForcingField& forcing, const RieszOperator& a,
                                 const SpdFactorization& a_factor, const Grid& grid) {
    const int m = static_cast<int>(trajectory.size()) - 1;
    if (m < 0 || static_cast<int>(r_mid.size()) != m) {
        throw std::invalid_argument("stability_bounds: trajectory and coefficients disagree");
    }
    const double tau = grid.tau();
    StabilityReport report;
    report.identity_residuals = Vector::Zero(m);
    report.l2_slack = Vector::Zero(m + 1);
    report.energy_slack = Vector::Zero(m + 1);

    const double u0 = trajectory.states[0].norm();
    double l2_bound = u0;
    double energy_bound = u0 * u0;
    double dissipation = 0.0;
    for (int n = 0; n < m; ++n) {
        const Vector& un = trajectory.states[n];
        const Vector& unp1 = trajectory.states[n + 1];
        const Vector f = forcing(grid.t_mid(n));
        const double r = r_mid[n];
        const Vector mid = 0.5 * (un + unp1);
        const double mid_energy = mid.dot(a.apply(mid));

        report.identity_residuals[n] = unp1.squaredNorm() - un.squaredNorm() +
                                       2.0 * tau * mid_energy - 2.0 * tau * r * f.dot(mid);

        l2_bound += tau * std::abs(r) * f.norm();
        const double dual = dual_norm(a_factor, f);
        energy_bound += tau * r * r * dual * dual;
        dissipation += tau * mid_energy;

        report.l2_slack[n + 1] = l2_bound - unp1.norm();
        report.energy_slack[n + 1] = energy_bound - unp1.squaredNorm() - dissipation;
    }
    return report;
}

Vector spectral_duhamel_oracle(const SpectralDecomposition& decomp, const Vector& phi,
                               const ScalarFunction& r, const ForcingField& forcing,
                               const Grid& grid, int substeps) {
    if (decomp.size() == 0) {
        throw std::invalid_argument("spectral_duhamel_oracle: eigendecomposition unavailable");
    }
    if (phi.size() != decomp.size()) {
        throw std::invalid_argument("spectral_duhamel_oracle: phi length mismatch");
    }
    if (substeps < 2) {
        throw std::invalid_argument("spectral_duhamel_oracle: need at least two substeps");
    }
    const int panels = substeps + (substeps % 2);
    const double T = grid.final_time();
    const double w = T / panels;
    const Matrix& q = decomp.eigenvectors;
    const Vector& lambda = decomp.eigenvalues;

    Vector coeff = q.transpose() * phi;
    for (int k = 0; k < coeff.size(); ++k) {
        coeff[k] *= std::exp(-lambda[k] * T);
    }

    Vector integral = Vector::Zero(coeff.size());
    for (int j = 0; j <= panels; ++j) {
        const double t = j * w;
        const double simpson = (j == 0 || j == panels) ? 1.0 : ((j % 2 == 1) ? 4.0 : 2.0);
        const double rt = r(t);
        if (rt == 0.0) {
            continue;
        }
        const Vector proj = q.transpose() * forcing(t);
        for (int k = 0; k < proj.size(); ++k) {
            integral[k] += simpson * rt * proj[k] * std::exp(-lambda[k] * (T - t));
        }
    }
    coeff += (w / 3.0) * integral;
    return q * coeff;
}

}  // namespace fracheat
