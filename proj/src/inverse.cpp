#include "fracheat/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace fracheat {

double discrete_measurement(const Vector& u, const Vector& weight, double h) {
    if (u.size() != weight.size()) {
        throw std::invalid_argument("discrete_measurement: state and weight lengths differ");
    }
    return h * u.dot(weight);
}

DenominatorNearZero::DenominatorNearZero(double value, int step)
    : std::runtime_error("recovery denominator " + std::to_string(value) +
                         " is numerically zero" +
                         (step >= 0 ? " at step " + std::to_string(step) : std::string())),
      value_(value),
      step_(step) {}

RecoveryStep recover_r_step(const StepOperators& ops, const Vector& u_n, double w_n,
                            double w_np1, const Vector& f_mid, const Vector& weight, double h,
                            int step) {
    const auto& a = ops.riesz();
    const double tau = ops.tau();
    if (u_n.size() != a.size() || f_mid.size() != a.size() || weight.size() != a.size()) {
        throw std::invalid_argument("recover_r_step: vector length does not match operator size");
    }

    RecoveryStep out;
    out.y = ops.solve_l(ops.apply_r(u_n));
    out.s = ops.solve_l(f_mid);
    out.v = 0.5 * (u_n + out.y);

    // <A V, omega> = <V, A omega>
    const Vector a_weight = a.apply(weight);
    const double f_pair = h * f_mid.dot(weight);
    out.numerator = (w_np1 - w_n) / tau + h * out.v.dot(a_weight);
    out.denominator = f_pair - 0.5 * tau * h * out.s.dot(a_weight);

    const double guard = 1e-12 * std::max(1.0, std::abs(f_pair));
    if (!(std::abs(out.denominator) > guard)) {
        throw DenominatorNearZero(out.denominator, step);
    }
    out.r_mid = out.numerator / out.denominator;
    out.u_next = out.y + tau * out.r_mid * out.s;
    return out;
}

InverseResult run_inverse(const StepOperators& ops, const Grid& grid, const Vector& phi,
                          const ForcingField& forcing, const Vector& weight,
                          const MeasurementSeries& measurements) {
    const int m = grid.time_steps();
    const auto& w = measurements.values;
    if (w.size() != m + 1) {
        throw std::invalid_argument("run_inverse: expected " + std::to_string(m + 1) +
                                    " measurements, got " + std::to_string(w.size()));
    }
    if (!w.allFinite()) {
        throw std::invalid_argument("run_inverse: measurements contain non-finite values");
    }

    InverseResult result;
    const double w0_discrete = discrete_measurement(phi, weight, grid.h());
    result.compatibility_gap =
        std::abs(w[0] - w0_discrete) / std::max(std::abs(w[0]), 1e-300);
    result.compatibility_warning = result.compatibility_gap > 1e-2;

    result.coefficients.values.resize(m);
    result.trajectory.states.reserve(m + 1);
    result.trajectory.states.push_back(phi);
    for (int n = 0; n < m; ++n) {
        try {
            auto step = recover_r_step(ops, result.trajectory.states.back(), w[n], w[n + 1],
                                       forcing(grid.t_mid(n)), weight, grid.h(), n);
            result.coefficients.values[n] = step.r_mid;
            result.trajectory.states.push_back(std::move(step.u_next));
        } catch (const DenominatorNearZero&) {
            throw;
        } catch (const std::exception& e) {
            throw std::runtime_error("run_inverse: step " + std::to_string(n) + ": " + e.what());
        }
    }
    return result;
}

MeasurementSeries perturb_measurements(const MeasurementSeries& w, const NoiseSpec& spec) {
    if (!(spec.delta >= 0.0 && spec.delta < 1.0)) {
        throw std::invalid_argument("perturb_measurements: delta must lie in [0, 1)");
    }
    MeasurementSeries out = w;
    out.kind = MeasurementKind::noisy;
    out.delta = spec.delta;
    out.seed = spec.seed;
    if (w.values.size() == 0) {
        return out;
    }
    const double amplitude = spec.delta * w.values.cwiseAbs().maxCoeff();
    std::mt19937_64 engine(spec.seed);
    for (Eigen::Index n = 0; n < out.values.size(); ++n) {
        const double unit = static_cast<double>(engine() >> 11) * 0x1.0p-53;
        const double eta = 2.0 * unit - 1.0;
        out.values[n] += amplitude * eta;
    }
    return out;
}

MeasurementSeries smooth_measurements(const MeasurementSeries& w, int window) {
    const auto len = static_cast<int>(w.values.size());
    if (window < 1 || window % 2 == 0) {
        throw std::invalid_argument("smooth_measurements: window must be a positive odd integer");
    }
    if (window > len) {
        throw std::invalid_argument("smooth_measurements: window exceeds series length");
    }
    MeasurementSeries out = w;
    const int half = window / 2;
    for (int n = 0; n < len; ++n) {
        const int reach = std::min({half, n, len - 1 - n});
        double sum = 0.0;
        for (int j = n - reach; j <= n + reach; ++j) {
            sum += w.values[j];
        }
        out.values[n] = sum / (2 * reach + 1);
    }
    return out;
}

MeasurementSeries measure_trajectory(const Trajectory& trajectory, const Vector& weight,
                                     double h) {
    MeasurementSeries out;
    out.kind = MeasurementKind::discrete_generated;
    out.values.resize(static_cast<Eigen::Index>(trajectory.size()));
    for (std::size_t n = 0; n < trajectory.size(); ++n) {
        out.values[static_cast<Eigen::Index>(n)] =
            discrete_measurement(trajectory.states[n], weight, h);
    }
    return out;
}

}  // namespace fracheat
