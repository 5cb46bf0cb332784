#pragma once

#include <string>
#include <vector>

#include <gridsight/error.hpp>

namespace gridsight {

struct ThrustParams {
    double total_weight_g = 0.0;
    double alpha = 1.1; // safety factor, 1 + 20%
    int n_motors = 4;
};

struct MassItem {
    std::string name;
    double unit_weight_g = 0.0;
    int pieces = 1;
};

struct MassBudget {
    std::vector<MassItem> items;
};

struct LaserReadings {
    double distances_m[3] = {0.0, 0.0, 0.0};
    double spacing_m = 0.0;
};

/// Required thrust per motor: 2 * alpha * W / N.
double thrust_per_motor(const ThrustParams& p);

/// Sum of unit weight times piece count over the budget.
double total_mass(const MassBudget& b);

/// Misalignment angle of the three-sensor laser array: least-squares
/// slope of (k * spacing, d_k) for k = 0,1,2, returned as arctangent in
/// radians. Positive when readings grow with k.
double alignment_angle(const LaserReadings& r);

} // namespace gridsight
