#include <gridsight/platform.hpp>

#include <cmath>

namespace gridsight {

namespace {

// LDM41A measuring range, meters
constexpr double kRangeMin = 0.2;
constexpr double kRangeMax = 30.0;

} // namespace

double thrust_per_motor(const ThrustParams& p) {
    if (p.n_motors < 1) {
        throw InvalidArgumentError("thrust_per_motor: motor count must be at least 1");
    }
    if (p.total_weight_g <= 0.0 || p.alpha <= 0.0) {
        throw InvalidArgumentError("thrust_per_motor: weight and safety factor must be positive");
    }
    return 2.0 * p.alpha * p.total_weight_g / p.n_motors;
}

double total_mass(const MassBudget& b) {
    double sum = 0.0;
    for (const MassItem& item : b.items) {
        if (item.unit_weight_g < 0.0) {
            throw InvalidArgumentError("total_mass: negative weight for " + item.name);
        }
        if (item.pieces < 1) {
            throw InvalidArgumentError("total_mass: piece count must be at least 1 for " + item.name);
        }
        sum += item.unit_weight_g * item.pieces;
    }
    return sum;
}

double alignment_angle(const LaserReadings& r) {
    if (r.spacing_m <= 0.0) {
        throw InvalidArgumentError("alignment_angle: sensor spacing must be positive");
    }
    for (const double d : r.distances_m) {
        if (d < kRangeMin || d > kRangeMax) {
            throw RangeError("alignment_angle: reading outside sensor range [0.2, 30] m");
        }
    }
    // closed-form least squares over x = {0, s, 2s}
    const double x_mean = r.spacing_m;
    const double d_mean = (r.distances_m[0] + r.distances_m[1] + r.distances_m[2]) / 3.0;
    double num = 0.0;
    double den = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double dx = k * r.spacing_m - x_mean;
        num += dx * (r.distances_m[k] - d_mean);
        den += dx * dx;
    }
    return std::atan(num / den);
}

} // namespace gridsight
