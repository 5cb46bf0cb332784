#include <gridsight/hough.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gridsight {

std::vector<HoughLine> hough_lines(const BitMask& edges, double rho_res, double theta_res, int min_votes) {
    if (rho_res <= 0.0 || theta_res <= 0.0) {
        throw InvalidArgumentError("hough_lines: resolutions must be positive");
    }
    if (min_votes < 1) {
        throw InvalidArgumentError("hough_lines: min_votes must be at least 1");
    }
    std::vector<HoughLine> out;
    if (edges.count() == 0) {
        return out;
    }

    const double diag = std::hypot(edges.width, edges.height);
    const int n_rho = 2 * static_cast<int>(std::ceil(diag / rho_res)) + 1;
    const int rho_center = n_rho / 2;
    const int n_theta = static_cast<int>(std::floor(180.0 / theta_res));

    std::vector<double> sin_t(n_theta);
    std::vector<double> cos_t(n_theta);
    for (int t = 0; t < n_theta; ++t) {
        const double rad = t * theta_res * std::numbers::pi / 180.0;
        sin_t[t] = std::sin(rad);
        cos_t[t] = std::cos(rad);
    }

    std::vector<int> acc(static_cast<std::size_t>(n_theta) * n_rho, 0);
    for (int y = 0; y < edges.height; ++y) {
        for (int x = 0; x < edges.width; ++x) {
            if (!edges.get(x, y)) {
                continue;
            }
            for (int t = 0; t < n_theta; ++t) {
                const double rho = x * cos_t[t] + y * sin_t[t];
                const int r = rho_center + static_cast<int>(std::lround(rho / rho_res));
                if (r >= 0 && r < n_rho) {
                    ++acc[static_cast<std::size_t>(t) * n_rho + r];
                }
            }
        }
    }

    // 3x3 NMS over (theta, rho); a plateau keeps its first cell in scan
    // order (strictly greater than earlier neighbors, >= later ones)
    auto acc_at = [&](int t, int r) -> int {
        if (t < 0 || t >= n_theta || r < 0 || r >= n_rho) {
            return -1;
        }
        return acc[static_cast<std::size_t>(t) * n_rho + r];
    };
    for (int t = 0; t < n_theta; ++t) {
        for (int r = 0; r < n_rho; ++r) {
            const int v = acc_at(t, r);
            if (v < min_votes) {
                continue;
            }
            bool keep = true;
            for (int dt = -1; dt <= 1 && keep; ++dt) {
                for (int dr = -1; dr <= 1 && keep; ++dr) {
                    if (dt == 0 && dr == 0) {
                        continue;
                    }
                    const int nv = acc_at(t + dt, r + dr);
                    const bool earlier = dt < 0 || (dt == 0 && dr < 0);
                    if (earlier ? nv >= v : nv > v) {
                        keep = false;
                    }
                }
            }
            if (keep) {
                out.push_back({(r - rho_center) * rho_res, t * theta_res, v});
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const HoughLine& a, const HoughLine& b) {
        return a.votes > b.votes;
    });
    return out;
}

double angle_distance_deg(double a, double b) {
    double d = std::fmod(std::fabs(a - b), 180.0);
    return std::min(d, 180.0 - d);
}

std::vector<HoughLine> filter_lines_by_angle(const std::vector<HoughLine>& lines, double center_deg,
                                             double half_window_deg) {
    if (half_window_deg <= 0.0 || half_window_deg >= 90.0) {
        throw InvalidArgumentError("filter_lines_by_angle: half window must be in (0,90)");
    }
    std::vector<HoughLine> out;
    for (const HoughLine& l : lines) {
        if (angle_distance_deg(l.theta_deg, center_deg) <= half_window_deg) {
            out.push_back(l);
        }
    }
    return out;
}

} // namespace gridsight
