#pragma once

#include "fracheat/forward.hpp"
#include "fracheat/grid.hpp"

#include <cstdint>
#include <stdexcept>

namespace fracheat {

/// h * sum_i U_i omega_i.
double discrete_measurement(const Vector& u, const Vector& weight, double h);

/// The recovery denominator h<F,omega> - (tau/2) h<AS,omega> fell below the
/// relative guard, i.e. the pair (f, omega) is not identifiable on this grid.
class DenominatorNearZero : public std::runtime_error {
public:
    DenominatorNearZero(double value, int step);
    double value() const { return value_; }
    /// Time step index n, or -1 when raised outside a run.
    int step() const { return step_; }

private:
    double value_;
    int step_;
};

/// Intermediate quantities of one recovery step.
struct RecoveryStep {
    double r_mid = 0.0;
    Vector u_next;
    Vector y;  ///< L^{-1} R U^n
    Vector s;  ///< L^{-1} F^{n+1/2}
    Vector v;  ///< (U^n + Y) / 2
    double numerator = 0.0;
    double denominator = 0.0;
};

/// Recovers r^{n+1/2} in closed form from the measurement increment and
/// advances the state with U^{n+1} = Y + tau r S. `step` only labels errors.
RecoveryStep recover_r_step(const StepOperators& ops, const Vector& u_n, double w_n,
                            double w_np1, const Vector& f_mid, const Vector& weight, double h,
                            int step = -1);

struct InverseResult {
    Trajectory trajectory;
    CoefficientSeries coefficients;
    /// |w^0 - h<U^0,omega>| / max(|w^0|, tiny).
    double compatibility_gap = 0.0;
    bool compatibility_warning = false;
};

/// Simultaneous recovery of {U^n} and {r^{n+1/2}} from w^0..w^M.
InverseResult run_inverse(const StepOperators& ops, const Grid& grid, const Vector& phi,
                          const ForcingField& forcing, const Vector& weight,
                          const MeasurementSeries& measurements);

enum class NoiseDistribution { uniform };

struct NoiseSpec {
    double delta = 0.0;
    std::uint64_t seed = 0;
    NoiseDistribution distribution = NoiseDistribution::uniform;
    int smoothing_window = 1;
};

/// w^{delta,n} = w^n + delta ||w||_inf eta_n with eta_n iid uniform on [-1, 1].
/// Deterministic for a given seed on every platform.
MeasurementSeries perturb_measurements(const MeasurementSeries& w, const NoiseSpec& spec);

/// Centred moving average; the window shrinks symmetrically near the ends.
/// Throws std::invalid_argument for an even or out-of-range window.
MeasurementSeries smooth_measurements(const MeasurementSeries& w, int window);

/// w^n = h<U^n, omega> along a trajectory.
MeasurementSeries measure_trajectory(const Trajectory& trajectory, const Vector& weight,
                                     double h);

}  // namespace fracheat
