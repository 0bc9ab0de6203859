#include "fracheat/grid.hpp"

#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracheat {

Grid Grid::make(double l, double T, int N, int M, double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("fractional order s must lie in (0, 1)");
    }
    if (N < 2) {
        throw std::invalid_argument("N must be at least 2");
    }
    if (M < 1) {
        throw std::invalid_argument("M must be at least 1");
    }
    if (!(l > 0.0) || !std::isfinite(l)) {
        throw std::invalid_argument("domain length l must be positive");
    }
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw std::invalid_argument("final time T must be positive");
    }
    return Grid(l, T, N, M, s);
}

Grid::Grid(double l, double T, int N, int M, double s)
    : l_(l), T_(T), N_(N), M_(M), s_(s), h_(l / N), tau_(T / M) {
    assert(std::abs(h_ * N_ - l_) <= 1e-12 * l_);
    assert(std::abs(tau_ * M_ - T_) <= 1e-12 * T_);
}

Vector Grid::sample(const std::function<double(double)>& fn) const {
    Vector out(interior_size());
    for (int k = 0; k < interior_size(); ++k) {
        out[k] = fn(x_at(k));
    }
    return out;
}

std::string MeasurementSeries::provenance() const {
    switch (kind) {
    case MeasurementKind::exact_analytic:
        return "exact-analytic";
    case MeasurementKind::discrete_generated:
        return "discrete-generated";
    case MeasurementKind::noisy: {
        std::ostringstream os;
        os << "noisy(" << delta << ", " << seed << ")";
        return os.str();
    }
    }
    return "unknown";
}

void validate(const ProblemData& data, const Grid& grid) {
    const auto n = static_cast<Eigen::Index>(grid.interior_size());
    if (data.phi.size() != n) {
        throw std::invalid_argument("initial profile length does not match N-1");
    }
    if (data.weight.size() != n) {
        throw std::invalid_argument("weight length does not match N-1");
    }
    if (!data.forcing) {
        throw std::invalid_argument("forcing field is not set");
    }
    if (data.measurements.values.size() != 0 &&
        data.measurements.values.size() != grid.time_steps() + 1) {
        throw std::invalid_argument("measurement series length does not match M+1");
    }
}

}  // namespace fracheat
