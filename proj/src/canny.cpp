#include <gridsight/canny.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include <gridsight/convolve.hpp>

namespace gridsight {

BitMask canny(const RasterGray& img, double sigma, double t_low, double t_high) {
    if (img.empty()) {
        throw InvalidArgumentError("canny: empty image");
    }
    if (sigma <= 0.0) {
        throw InvalidArgumentError("canny: sigma must be positive");
    }
    if (!(0.0 < t_low && t_low < t_high && t_high <= 1.0)) {
        throw InvalidArgumentError("canny: need 0 < t_low < t_high <= 1");
    }

    const RasterGray smooth = gaussian_blur(img, sigma);

    const int w = img.width;
    const int h = img.height;
    RasterGray mag(w, h);
    std::vector<signed char> dir_x(static_cast<std::size_t>(w) * h);
    std::vector<signed char> dir_y(static_cast<std::size_t>(w) * h);
    double max_mag = 0.0;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, w - 1);
            const int ym = std::max(y - 1, 0);
            const int yp = std::min(y + 1, h - 1);
            const double gx = (smooth.at(xp, y) - smooth.at(xm, y)) * 0.5;
            const double gy = (smooth.at(x, yp) - smooth.at(x, ym)) * 0.5;
            const double m = std::hypot(gx, gy);
            mag.at(x, y) = m;
            max_mag = std::max(max_mag, m);
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            if (m > 0.0) {
                const double ang = std::atan2(gy, gx);
                dir_x[idx] = static_cast<signed char>(std::lround(std::cos(ang)));
                dir_y[idx] = static_cast<signed char>(std::lround(std::sin(ang)));
            }
        }
    }

    BitMask edges(w, h);
    if (max_mag == 0.0) {
        return edges; // flat image, nothing to link
    }

    // Non-maximum suppression along the quantized gradient direction.
    // Ties keep the pixel whose trailing neighbor is strictly smaller,
    // so a symmetric two-pixel ridge thins to one pixel.
    auto mag_at = [&](int x, int y) -> double {
        if (x < 0 || x >= w || y < 0 || y >= h) {
            return 0.0;
        }
        return mag.at(x, y);
    };
    RasterGray thin(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double m = mag.at(x, y);
            if (m <= 0.0) {
                continue;
            }
            const std::size_t idx = static_cast<std::size_t>(y) * w + x;
            const int dx = dir_x[idx];
            const int dy = dir_y[idx];
            const double ahead = mag_at(x + dx, y + dy);
            const double behind = mag_at(x - dx, y - dy);
            if (m > behind && m >= ahead) {
                thin.at(x, y) = m;
            }
        }
    }

    // Hysteresis: grow from strong pixels over weak ones, 8-connected.
    const double lo = t_low * max_mag;
    const double hi = t_high * max_mag;
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (thin.at(x, y) >= hi && !edges.get(x, y)) {
                edges.set(x, y);
                stack.push_back({x, y});
                while (!stack.empty()) {
                    const auto [cx, cy] = stack.back();
                    stack.pop_back();
                    for (int ny = cy - 1; ny <= cy + 1; ++ny) {
                        for (int nx = cx - 1; nx <= cx + 1; ++nx) {
                            if (nx < 0 || nx >= w || ny < 0 || ny >= h) {
                                continue;
                            }
                            if (!edges.get(nx, ny) && thin.at(nx, ny) >= lo) {
                                edges.set(nx, ny);
                                stack.push_back({nx, ny});
                            }
                        }
                    }
                }
            }
        }
    }
    return edges;
}

} // namespace gridsight
