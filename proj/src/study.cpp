#include "fracheat/study.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fracheat {

void StudyConfig::validate() const {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("config: s must lie in (0, 1)");
    }
    if (!(l > 0.0) || !(T > 0.0)) {
        throw std::invalid_argument("config: l and T must be positive");
    }
    if (N_values.empty()) {
        throw std::invalid_argument("config: N list is empty");
    }
    if (M_values.empty() && !couple_tau_to_h) {
        throw std::invalid_argument("config: M list is empty");
    }
    for (int n : N_values) {
        if (n < 2) {
            throw std::invalid_argument("config: every N must be at least 2");
        }
    }
    for (int m : M_values) {
        if (m < 1) {
            throw std::invalid_argument("config: every M must be at least 1");
        }
    }
    for (double d : deltas) {
        if (!(d >= 0.0 && d < 1.0)) {
            throw std::invalid_argument("config: every delta must lie in [0, 1)");
        }
    }
    if (smoothing_window < 1 || smoothing_window % 2 == 0) {
        throw std::invalid_argument("config: smooth-window must be a positive odd integer");
    }
    if (!(tol > 0.0)) {
        throw std::invalid_argument("config: tol must be positive");
    }
}

CaseErrors measure_errors(const Grid& grid, const Trajectory& trajectory,
                          const CoefficientSeries& r, const Vector& u_exact_final,
                          const Vector& r_exact_mid) {
    CaseErrors e;
    const Vector du = trajectory.final_state() - u_exact_final;
    e.linf_u = du.size() ? du.cwiseAbs().maxCoeff() : 0.0;
    e.l2_u = std::sqrt(grid.h() * du.squaredNorm());
    const Vector dr = r.values - r_exact_mid;
    e.linf_r = dr.size() ? dr.cwiseAbs().maxCoeff() : 0.0;
    e.l2_r = std::sqrt(grid.tau() * dr.squaredNorm());
    return e;
}

CaseResult run_manufactured_inverse(ExampleId id, const Grid& grid, SourceMode source,
                                    SolverKind solver, double tol,
                                    const std::optional<MeasurementSeries>& measurements) {
    const auto mc = build_manufactured(id, grid, source);
    const StepOperators ops(assemble(grid), grid.tau(), solver, tol);
    auto inverse = run_inverse(ops, grid, mc.data.phi, mc.data.forcing, mc.data.weight,
                               measurements ? *measurements : mc.data.measurements);
    Vector u_exact = mc.problem.u_nodal(grid, grid.final_time());
    Vector r_exact = sample_midpoints(grid, mc.problem.r_exact).values;
    const auto errors = measure_errors(grid, inverse.trajectory, inverse.coefficients, u_exact,
                                       r_exact);
    return CaseResult{grid, std::move(inverse), std::move(u_exact), std::move(r_exact), errors};
}

namespace {

double observed_order(double e_prev, double e, double step_prev, double step) {
    return std::log(e_prev / e) / std::log(step_prev / step);
}

void fill_orders(ConvergenceTable& table, bool by_tau) {
    for (std::size_t i = 1; i < table.rows.size(); ++i) {
        auto& prev = table.rows[i - 1];
        auto& row = table.rows[i];
        const double sp = by_tau ? prev.tau : prev.h;
        const double sc = by_tau ? row.tau : row.h;
        row.order_u = observed_order(prev.linf_u, row.linf_u, sp, sc);
        row.order_r = observed_order(prev.linf_r, row.linf_r, sp, sc);
    }
}

ConvergenceRow row_of(const CaseResult& c) {
    ConvergenceRow row;
    row.h = c.grid.h();
    row.tau = c.grid.tau();
    row.linf_u = c.errors.linf_u;
    row.l2_u = c.errors.l2_u;
    row.linf_r = c.errors.linf_r;
    return row;
}

}  // namespace

ConvergenceTable convergence_study_time(const StudyConfig& config) {
    config.validate();
    if (config.M_values.empty()) {
        throw std::invalid_argument("convergence_study_time: M list is empty");
    }
    ConvergenceTable table;
    const int N = config.N_values.front();
    for (int M : config.M_values) {
        const auto grid = Grid::make(config.l, config.T, N, M, config.s);
        table.rows.push_back(row_of(run_manufactured_inverse(config.example, grid, config.source,
                                                             config.solver, config.tol)));
    }
    fill_orders(table, true);
    return table;
}

ConvergenceTable convergence_study_space(const StudyConfig& config) {
    config.validate();
    if (!config.couple_tau_to_h && config.M_values.size() != config.N_values.size()) {
        throw std::invalid_argument(
            "convergence_study_space: M list must match N list unless tau is coupled to h");
    }
    ConvergenceTable table;
    for (std::size_t i = 0; i < config.N_values.size(); ++i) {
        const int N = config.N_values[i];
        int M = 0;
        if (config.couple_tau_to_h) {
            // tau = h  <=>  T / M = l / N
            M = static_cast<int>(std::lround(N * config.T / config.l));
        } else {
            M = config.M_values[i];
        }
        const auto grid = Grid::make(config.l, config.T, N, M, config.s);
        table.rows.push_back(row_of(run_manufactured_inverse(config.example, grid, config.source,
                                                             config.solver, config.tol)));
    }
    fill_orders(table, false);
    return table;
}

double rate_fit(const std::vector<double>& errors, const std::vector<double>& steps) {
    if (errors.size() != steps.size() || errors.size() < 2) {
        throw std::invalid_argument("rate_fit: need at least two (error, step) pairs");
    }
    const auto n = static_cast<double>(errors.size());
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < errors.size(); ++i) {
        if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) {
            throw std::invalid_argument("rate_fit: errors and steps must be positive");
        }
        const double x = std::log(steps[i]);
        const double y = std::log(errors[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) {
        throw std::invalid_argument("rate_fit: steps must not all be equal");
    }
    return (n * sxy - sx * sy) / denom;
}

double NoiseStudyResult::mean_linf_r(double delta) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& c : cases) {
        if (c.completed && c.delta == delta) {
            sum += c.errors_raw.linf_r;
            ++count;
        }
    }
    return count ? sum / count : std::nan("");
}

std::optional<double> NoiseStudyResult::mean_linf_r_smoothed(double delta) const {
    double sum = 0.0;
    int count = 0;
    for (const auto& c : cases) {
        if (c.completed && c.delta == delta && c.errors_smoothed) {
            sum += c.errors_smoothed->linf_r;
            ++count;
        }
    }
    if (count == 0) {
        return std::nullopt;
    }
    return sum / count;
}

bool NoiseStudyResult::all_completed() const {
    for (const auto& c : cases) {
        if (!c.completed) {
            return false;
        }
    }
    return true;
}

NoiseStudyResult noise_study(const StudyConfig& config) {
    config.validate();
    const int N = config.N_values.front();
    const int M = config.couple_tau_to_h
                      ? static_cast<int>(std::lround(N * config.T / config.l))
                      : config.M_values.front();
    const auto grid = Grid::make(config.l, config.T, N, M, config.s);
    const auto mc = build_manufactured(config.example, grid, config.source);
    const StepOperators ops(assemble(grid), grid.tau(), config.solver, config.tol);

    NoiseStudyResult result{grid, sample_midpoints(grid, mc.problem.r_exact).values,
                            mc.problem.u_nodal(grid, grid.final_time()), {}};

    const auto errors_of = [&](const InverseResult& inv) {
        return measure_errors(grid, inv.trajectory, inv.coefficients, result.u_exact_final,
                              result.r_exact_mid);
    };

    for (double delta : config.deltas) {
        for (std::uint64_t seed : config.seeds) {
            NoiseCase nc;
            nc.delta = delta;
            nc.seed = seed;
            try {
                NoiseSpec spec;
                spec.delta = delta;
                spec.seed = seed;
                spec.smoothing_window = config.smoothing_window;
                const auto noisy = perturb_measurements(mc.data.measurements, spec);
                const auto raw = run_inverse(ops, grid, mc.data.phi, mc.data.forcing,
                                             mc.data.weight, noisy);
                nc.r_raw = raw.coefficients;
                nc.errors_raw = errors_of(raw);
                nc.u_final = raw.trajectory.final_state();
                if (config.smoothing_window > 1) {
                    const auto smoothed = smooth_measurements(noisy, config.smoothing_window);
                    const auto sm = run_inverse(ops, grid, mc.data.phi, mc.data.forcing,
                                                mc.data.weight, smoothed);
                    nc.r_smoothed = sm.coefficients;
                    nc.errors_smoothed = errors_of(sm);
                }
                nc.completed = nc.r_raw.values.allFinite() &&
                               (!nc.r_smoothed || nc.r_smoothed->values.allFinite());
                if (!nc.completed) {
                    nc.failure = "non-finite recovered coefficient";
                }
            } catch (const DenominatorNearZero& e) {
                nc.failure = e.what();
            }
            result.cases.push_back(std::move(nc));
        }
    }
    return result;
}

}  // namespace fracheat
