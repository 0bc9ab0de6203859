#pragma once

#include "fracheat/inverse.hpp"
#include "fracheat/manufactured.hpp"
#include "fracheat/spd.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fracheat {

struct StudyConfig {
    ExampleId example = ExampleId::example1;
    double s = 0.5;
    double l = 1.0;
    double T = 1.0;
    std::vector<int> N_values;
    std::vector<int> M_values;
    /// Use M = N (tau = h for l = T = 1) instead of M_values.
    bool couple_tau_to_h = false;
    SolverKind solver = SolverKind::automatic;
    double tol = 1e-12;
    SourceMode source = SourceMode::discrete;
    std::vector<double> deltas;
    std::vector<std::uint64_t> seeds;
    int smoothing_window = 1;
    std::string output_dir = ".";

    /// Throws std::invalid_argument for empty lists or out-of-range values.
    void validate() const;
};

/// Errors of an inverse run against the manufactured solution.
struct CaseErrors {
    double linf_u = 0.0;  ///< max_i |u_i^M - u(T, x_i)|
    double l2_u = 0.0;    ///< (h sum_i (u_i^M - u(T, x_i))^2)^{1/2}
    double linf_r = 0.0;  ///< max_n |r^{n+1/2} - r(t^{n+1/2})|
    double l2_r = 0.0;    ///< (tau sum_n (.)^2)^{1/2}
};

struct CaseResult {
    Grid grid;
    InverseResult inverse;
    Vector u_exact_final;
    Vector r_exact_mid;
    CaseErrors errors;
};

CaseErrors measure_errors(const Grid& grid, const Trajectory& trajectory,
                          const CoefficientSeries& r, const Vector& u_exact_final,
                          const Vector& r_exact_mid);

/// Builds the manufactured case on `grid` and runs the inverse algorithm with
/// `measurements` (analytic w when empty).
CaseResult run_manufactured_inverse(ExampleId id, const Grid& grid, SourceMode source,
                                    SolverKind solver, double tol,
                                    const std::optional<MeasurementSeries>& measurements = {});

struct ConvergenceRow {
    double h = 0.0;
    double tau = 0.0;
    double linf_u = 0.0;
    double l2_u = 0.0;
    double linf_r = 0.0;
    /// Observed orders relative to the previous row; empty on the first row.
    std::optional<double> order_u;
    std::optional<double> order_r;
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
};

/// Fixed N = N_values[0], one row per M in M_values; orders measured against tau.
ConvergenceTable convergence_study_time(const StudyConfig& config);

/// One row per N in N_values with M = N when couple_tau_to_h is set (else
/// M_values[i]); orders measured against h.
ConvergenceTable convergence_study_space(const StudyConfig& config);

/// Least-squares slope of log(error) against log(step).
double rate_fit(const std::vector<double>& errors, const std::vector<double>& steps);

struct NoiseCase {
    double delta = 0.0;
    std::uint64_t seed = 0;
    bool completed = false;
    std::string failure;
    CoefficientSeries r_raw;
    CaseErrors errors_raw;
    Vector u_final;
    /// Present when smoothing_window > 1.
    std::optional<CoefficientSeries> r_smoothed;
    std::optional<CaseErrors> errors_smoothed;
};

struct NoiseStudyResult {
    Grid grid;
    Vector r_exact_mid;
    Vector u_exact_final;
    std::vector<NoiseCase> cases;

    /// Mean raw L-infinity r error over the completed cases at `delta`.
    double mean_linf_r(double delta) const;
    std::optional<double> mean_linf_r_smoothed(double delta) const;
    bool all_completed() const;
};

/// Every (delta, seed) pair on grid (N_values[0], M_values[0]).
NoiseStudyResult noise_study(const StudyConfig& config);

}  // namespace fracheat
