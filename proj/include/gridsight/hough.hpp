#pragma once

#include <vector>

#include <gridsight/raster.hpp>

namespace gridsight {

/// Line in normal form: rho = x*cos(theta) + y*sin(theta), theta in
/// degrees [0,180). theta 0 is a vertical line.
struct HoughLine {
    double rho = 0.0;
    double theta_deg = 0.0;
    int votes = 0;
};

/// Standard Hough transform over an edge mask. Returns accumulator
/// peaks (3x3 non-maximum suppression in rho/theta space) with at least
/// min_votes votes, sorted by votes descending.
std::vector<HoughLine> hough_lines(const BitMask& edges, double rho_res = 1.0, double theta_res = 1.0,
                                   int min_votes = 1);

/// Keeps lines whose angular distance to center_deg (mod 180) is at
/// most half_window_deg. Order is preserved.
std::vector<HoughLine> filter_lines_by_angle(const std::vector<HoughLine>& lines, double center_deg,
                                             double half_window_deg);

/// Angular distance between two orientations, in degrees, mod 180.
double angle_distance_deg(double a, double b);

} // namespace gridsight
