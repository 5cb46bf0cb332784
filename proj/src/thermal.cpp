#include <gridsight/thermal.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include <gridsight/convolve.hpp>

namespace gridsight {

std::uint64_t Histogram256::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

int Histogram256::occupied_bins() const {
    return static_cast<int>(std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
}

Histogram256 build_histogram(const RasterGray& img) {
    if (img.empty()) {
        throw InvalidArgumentError("build_histogram: empty image");
    }
    Histogram256 h;
    for (const double v : img.data) {
        const int bin = std::clamp(static_cast<int>(std::clamp(v, 0.0, 1.0) * 256.0), 0, 255);
        ++h.counts[bin];
    }
    return h;
}

RasterGray neighborhood_sum(const RasterGray& img, bool center_included) {
    if (img.empty()) {
        throw InvalidArgumentError("neighborhood_sum: empty image");
    }
    const Kernel2D ones(3, 3, std::vector<double>(9, 1.0));
    RasterGray out = convolve2d(img, ones, Border::Replicate);
    if (!center_included) {
        for (std::size_t i = 0; i < out.data.size(); ++i) {
            out.data[i] -= img.data[i];
        }
    }
    return out;
}

int otsu_threshold(const Histogram256& h) {
    const std::uint64_t n = h.total();
    if (n == 0 || h.occupied_bins() < 2) {
        throw DegenerateInputError("otsu_threshold: histogram needs at least two occupied bins");
    }
    // prefix counts / weighted sums are exact integers, so per-threshold
    // variances are bit-reproducible against a direct search
    std::uint64_t c0 = 0;
    std::uint64_t s0 = 0;
    std::uint64_t s_total = 0;
    for (int b = 0; b < 256; ++b) {
        s_total += h.counts[b] * static_cast<std::uint64_t>(b);
    }
    double best = -1.0;
    int best_lo = 0;
    int best_hi = 0;
    for (int t = 0; t < 256; ++t) {
        c0 += h.counts[t];
        s0 += h.counts[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t c1 = n - c0;
        if (c0 == 0 || c1 == 0) {
            continue;
        }
        const double w0 = static_cast<double>(c0) / static_cast<double>(n);
        const double w1 = static_cast<double>(c1) / static_cast<double>(n);
        const double mu0 = static_cast<double>(s0) / static_cast<double>(c0);
        const double mu1 = static_cast<double>(s_total - s0) / static_cast<double>(c1);
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best) {
            best = var;
            best_lo = t;
            best_hi = t;
        } else if (var == best) {
            best_hi = t;
        }
    }
    return (best_lo + best_hi) / 2;
}

BitMask extract_hotspots(const RasterGray& img, const ThermalOptions& opts) {
    const RasterGray summed = neighborhood_sum(img, opts.center_included);
    const RasterGray norm = normalize(summed);
    const Histogram256 hist = build_histogram(norm);
    const int t = otsu_threshold(hist);
    BitMask mask(img.width, img.height);
    for (std::size_t i = 0; i < norm.data.size(); ++i) {
        const int bin = std::clamp(static_cast<int>(std::clamp(norm.data[i], 0.0, 1.0) * 256.0), 0, 255);
        mask.bits[i] = bin > t ? 1 : 0;
    }
    return mask;
}

RasterGray expose_neighbor_edges(const RasterGray& img, const BitMask& hotspots, double edge_threshold) {
    if (img.empty()) {
        throw InvalidArgumentError("expose_neighbor_edges: empty image");
    }
    if (hotspots.width != img.width || hotspots.height != img.height) {
        throw DimensionMismatchError("expose_neighbor_edges: mask dimensions do not match image");
    }
    if (edge_threshold < 0.0 || edge_threshold > 1.0) {
        throw InvalidArgumentError("expose_neighbor_edges: edge threshold must be in [0,1]");
    }
    // central-difference gradient magnitude, replicate border
    RasterGray mag(img.width, img.height);
    double max_mag = 0.0;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const int xm = std::max(x - 1, 0);
            const int xp = std::min(x + 1, img.width - 1);
            const int ym = std::max(y - 1, 0);
            const int yp = std::min(y + 1, img.height - 1);
            const double gx = (img.at(xp, y) - img.at(xm, y)) * 0.5;
            const double gy = (img.at(x, yp) - img.at(x, ym)) * 0.5;
            const double m = std::hypot(gx, gy);
            mag.at(x, y) = m;
            max_mag = std::max(max_mag, m);
        }
    }
    const double thr = edge_threshold * max_mag;
    RasterGray out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (hotspots.get(x, y)) {
                out.at(x, y) = 1.0;
            } else if (max_mag > 0.0 && mag.at(x, y) > thr) {
                out.at(x, y) = 0.5;
            }
        }
    }
    return out;
}

std::vector<MaskComponent> mask_components(const BitMask& mask) {
    std::vector<MaskComponent> comps;
    std::vector<std::uint8_t> seen(mask.bits.size(), 0);
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * mask.width + x;
            if (!mask.bits[idx] || seen[idx]) {
                continue;
            }
            MaskComponent c{x, y, 1, 1, 0};
            int x0 = x;
            int y0 = y;
            int x1 = x;
            int y1 = y;
            stack.push_back({x, y});
            seen[idx] = 1;
            while (!stack.empty()) {
                const auto [cx, cy] = stack.back();
                stack.pop_back();
                ++c.pixels;
                x0 = std::min(x0, cx);
                y0 = std::min(y0, cy);
                x1 = std::max(x1, cx);
                y1 = std::max(y1, cy);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (nx < 0 || nx >= mask.width || ny < 0 || ny >= mask.height) {
                            continue;
                        }
                        const std::size_t nidx = static_cast<std::size_t>(ny) * mask.width + nx;
                        if (mask.bits[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            stack.push_back({nx, ny});
                        }
                    }
                }
            }
            c.x = x0;
            c.y = y0;
            c.w = x1 - x0 + 1;
            c.h = y1 - y0 + 1;
            comps.push_back(c);
        }
    }
    std::stable_sort(comps.begin(), comps.end(),
                     [](const MaskComponent& a, const MaskComponent& b) { return a.pixels > b.pixels; });
    return comps;
}

} // namespace gridsight
