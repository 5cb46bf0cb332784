#include <gridsight/proposal.hpp>

#include <algorithm>
#include <cmath>

namespace gridsight {

namespace {

struct WindowBounds {
    int x0 = 0;
    int y0 = 0;
    int w = 0;
    int h = 0;
};

WindowBounds window_at(const RasterGray& detail, Coord seed, int radius) {
    WindowBounds b;
    b.x0 = std::max(0, seed.x - radius);
    b.y0 = std::max(0, seed.y - radius);
    const int x1 = std::min(detail.width - 1, seed.x + radius);
    const int y1 = std::min(detail.height - 1, seed.y + radius);
    b.w = x1 - b.x0 + 1;
    b.h = y1 - b.y0 + 1;
    return b;
}

RasterGray extract_window(const RasterGray& detail, const WindowBounds& b) {
    RasterGray win(b.w, b.h);
    for (int y = 0; y < b.h; ++y) {
        for (int x = 0; x < b.w; ++x) {
            win.at(x, y) = detail.at(b.x0 + x, b.y0 + y);
        }
    }
    return win;
}

std::vector<double> window_nfc(const RasterGray& detail, Coord seed, int radius, WindowBounds& bounds) {
    bounds = window_at(detail, seed, radius);
    return nfc(dft2d(extract_window(detail, bounds)));
}

} // namespace

void ProposalParams::validate() const {
    if (e_max <= 0.0) {
        throw InvalidArgumentError("ProposalParams: e_max must be positive");
    }
    if (max_regions < 1 || max_radius < 1 || plateau_steps < 1) {
        throw InvalidArgumentError("ProposalParams: counts must be at least 1");
    }
    if (entropy_plateau_eps <= 0.0) {
        throw InvalidArgumentError("ProposalParams: plateau epsilon must be positive");
    }
    if (min_region_px < 0) {
        throw InvalidArgumentError("ProposalParams: min_region_px must be non-negative");
    }
}

Coord salient_pixel(const RasterGray& detail, const BitMask& suppressed) {
    if (detail.empty()) {
        throw InvalidArgumentError("salient_pixel: empty subband");
    }
    if (suppressed.width != detail.width || suppressed.height != detail.height) {
        throw DimensionMismatchError("salient_pixel: suppression mask dimensions differ");
    }
    bool found = false;
    double best = -1.0;
    Coord best_at;
    for (int y = 0; y < detail.height; ++y) {
        for (int x = 0; x < detail.width; ++x) {
            if (suppressed.get(x, y)) {
                continue;
            }
            const double v = std::fabs(detail.at(x, y));
            if (v > best) {
                best = v;
                best_at = {x, y};
                found = true;
            }
        }
    }
    if (!found) {
        throw ExhaustedError("salient_pixel: every coefficient is suppressed");
    }
    return best_at;
}

std::vector<double> nfc(const Spectrum2D& spec) {
    if (spec.coeffs.empty()) {
        throw InvalidArgumentError("nfc: empty spectrum");
    }
    double energy = 0.0;
    for (const auto& c : spec.coeffs) {
        energy += std::norm(c);
    }
    if (energy <= 0.0) {
        throw DegenerateInputError("nfc: all-zero spectrum");
    }
    const double inv_root = 1.0 / std::sqrt(energy);
    std::vector<double> out(spec.coeffs.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = std::abs(spec.coeffs[i]) * inv_root;
    }
    return out;
}

double ripple_entropy(const std::vector<double>& nfc_window) {
    if (nfc_window.empty()) {
        throw InvalidArgumentError("ripple_entropy: empty window");
    }
    double h = 0.0;
    for (const double v : nfc_window) {
        if (v > 0.0) {
            h += v * std::log(v);
        }
    }
    return std::min(h, 0.0); // clamp roundoff from values at 1.0
}

RippleState grow_ripple(const RasterGray& detail, Coord seed, const ProposalParams& p) {
    p.validate();
    if (seed.x < 0 || seed.x >= detail.width || seed.y < 0 || seed.y >= detail.height) {
        throw InvalidArgumentError("grow_ripple: seed out of bounds");
    }
    RippleState state;
    state.seed = seed;
    int streak = 0;
    WindowBounds bounds;
    for (int r = 1; r <= p.max_radius; ++r) {
        const std::vector<double> values = window_nfc(detail, seed, r, bounds);
        const double h = ripple_entropy(values);
        state.entropy_trace.push_back(h);
        state.radius = r;
        state.nfc_seed = values[static_cast<std::size_t>(seed.y - bounds.y0) * bounds.w + (seed.x - bounds.x0)];
        if (r >= 2) {
            const double dh = std::fabs(state.entropy_trace[r - 1] - state.entropy_trace[r - 2]);
            streak = dh < p.entropy_plateau_eps ? streak + 1 : 0;
            if (streak >= p.plateau_steps) {
                break;
            }
        }
    }
    return state;
}

std::vector<Coord> flood_fill_nfc(const std::vector<double>& nfc_map, int map_w, int map_h, Coord start,
                                  double e_max) {
    if (map_w < 1 || map_h < 1 || nfc_map.size() != static_cast<std::size_t>(map_w) * map_h) {
        throw InvalidArgumentError("flood_fill_nfc: bad map dimensions");
    }
    if (start.x < 0 || start.x >= map_w || start.y < 0 || start.y >= map_h) {
        throw InvalidArgumentError("flood_fill_nfc: start out of bounds");
    }
    const double ref = nfc_map[static_cast<std::size_t>(start.y) * map_w + start.x];
    std::vector<std::uint8_t> seen(nfc_map.size(), 0);
    std::vector<Coord> group;
    std::vector<Coord> stack{start};
    seen[static_cast<std::size_t>(start.y) * map_w + start.x] = 1;
    while (!stack.empty()) {
        const Coord c = stack.back();
        stack.pop_back();
        group.push_back(c);
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) {
                    continue;
                }
                const int nx = c.x + dx;
                const int ny = c.y + dy;
                if (nx < 0 || nx >= map_w || ny < 0 || ny >= map_h) {
                    continue;
                }
                const std::size_t idx = static_cast<std::size_t>(ny) * map_w + nx;
                if (!seen[idx] && std::fabs(nfc_map[idx] - ref) <= e_max) {
                    seen[idx] = 1;
                    stack.push_back({nx, ny});
                }
            }
        }
    }
    return group;
}

std::vector<Coord> group_by_nfc(const RasterGray& detail, const RippleState& ripple, double e_max) {
    if (ripple.radius < 1) {
        throw InvalidArgumentError("group_by_nfc: ripple has not been grown");
    }
    WindowBounds bounds;
    const std::vector<double> values = window_nfc(detail, ripple.seed, ripple.radius, bounds);
    const Coord start{ripple.seed.x - bounds.x0, ripple.seed.y - bounds.y0};
    std::vector<Coord> group = flood_fill_nfc(values, bounds.w, bounds.h, start, e_max);
    for (Coord& c : group) {
        c.x += bounds.x0;
        c.y += bounds.y0;
    }
    return group;
}

namespace {

void propose_from_subband(const RasterGray& detail, DetailSubband which, const ProposalParams& p,
                          int image_w, int image_h, std::vector<ProposalRegion>& out) {
    BitMask suppressed(detail.width, detail.height);
    for (int iter = 0; iter < p.max_regions; ++iter) {
        Coord seed;
        try {
            seed = salient_pixel(detail, suppressed);
        } catch (const ExhaustedError&) {
            break;
        }
        if (detail.at(seed.x, seed.y) == 0.0) {
            break; // nothing salient left
        }
        const RippleState ripple = grow_ripple(detail, seed, p);
        const std::vector<Coord> group = group_by_nfc(detail, ripple, p.e_max);

        int x0 = group.front().x;
        int y0 = group.front().y;
        int x1 = x0;
        int y1 = y0;
        for (const Coord& c : group) {
            x0 = std::min(x0, c.x);
            y0 = std::min(y0, c.y);
            x1 = std::max(x1, c.x);
            y1 = std::max(y1, c.y);
        }
        for (int y = y0; y <= y1; ++y) {
            for (int x = x0; x <= x1; ++x) {
                suppressed.set(x, y);
            }
        }

        ProposalRegion region;
        region.x = 2 * x0;
        region.y = 2 * y0;
        region.w = std::min(2 * (x1 - x0 + 1), image_w - region.x);
        region.h = std::min(2 * (y1 - y0 + 1), image_h - region.y);
        region.subband = which;
        region.seed = seed;
        region.entropy = ripple.entropy_trace.back();
        region.nfc_seed = ripple.nfc_seed;
        if (static_cast<long long>(region.w) * region.h >= p.min_region_px) {
            out.push_back(region);
        }
    }
}

} // namespace

std::vector<ProposalRegion> propose_regions(const RasterGray& img, const ProposalParams& p) {
    p.validate();
    if (img.width < 2 || img.height < 2) {
        throw InvalidArgumentError("propose_regions: image must be at least 2x2");
    }
    const SubbandSet bands = dwt2_level1(img, p.wavelet);
    std::vector<ProposalRegion> out;
    propose_from_subband(bands.vertical, DetailSubband::Vertical, p, img.width, img.height, out);
    propose_from_subband(bands.horizontal, DetailSubband::Horizontal, p, img.width, img.height, out);
    return out;
}

const char* to_string(DetailSubband s) {
    return s == DetailSubband::Vertical ? "vertical" : "horizontal";
}

} // namespace gridsight
