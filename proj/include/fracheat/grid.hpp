#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fracheat {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Uniform space-time mesh on (0, l) x (0, T) together with the fractional order.
///
/// Only interior nodes x_i = i*h, i = 1..N-1, carry unknowns; Dirichlet zeros at
/// x_0 and x_N are implicit. Storage index k corresponds to node i = k + 1.
class Grid {
public:
    /// Throws std::invalid_argument unless 0 < s < 1, N >= 2, M >= 1, l > 0, T > 0.
    static Grid make(double l, double T, int N, int M, double s);

    double length() const { return l_; }
    double final_time() const { return T_; }
    int space_intervals() const { return N_; }
    int time_steps() const { return M_; }
    double order() const { return s_; }
    double h() const { return h_; }
    double tau() const { return tau_; }

    /// Number of interior unknowns, N - 1.
    int interior_size() const { return N_ - 1; }

    /// Coordinate of node i (0 <= i <= N).
    double x(int i) const { return i * h_; }
    /// Coordinate of the interior node stored at index k.
    double x_at(int k) const { return x(node_of(k)); }
    double t(int n) const { return n * tau_; }
    double t_mid(int n) const { return (n + 0.5) * tau_; }

    static int node_of(int storage_index) { return storage_index + 1; }
    static int storage_of(int node) { return node - 1; }

    /// Samples fn at the interior nodes.
    Vector sample(const std::function<double(double)>& fn) const;

private:
    Grid(double l, double T, int N, int M, double s);

    double l_;
    double T_;
    int N_;
    int M_;
    double s_;
    double h_;
    double tau_;
};

/// Sequence of interior state vectors U^0..U^M.
struct Trajectory {
    std::vector<Vector> states;

    const Vector& final_state() const { return states.back(); }
    std::size_t size() const { return states.size(); }
};

enum class MeasurementKind { exact_analytic, discrete_generated, noisy };

/// Overdetermination values w^0..w^M.
struct MeasurementSeries {
    Vector values;
    MeasurementKind kind = MeasurementKind::exact_analytic;
    double delta = 0.0;
    std::uint64_t seed = 0;

    std::string provenance() const;
};

/// Recovered midpoint coefficients r^{n+1/2}, n = 0..M-1.
struct CoefficientSeries {
    Vector values;
};

/// F(t) sampled at the interior nodes.
using ForcingField = std::function<Vector(double)>;
using ScalarFunction = std::function<double(double)>;

struct ProblemData {
    Vector phi;
    ForcingField forcing;
    Vector weight;
    MeasurementSeries measurements;
    std::optional<ScalarFunction> coefficient;
};

/// Throws std::invalid_argument when the containers do not match the grid.
void validate(const ProblemData& data, const Grid& grid);

}  // namespace fracheat
