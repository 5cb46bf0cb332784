#include <gridsight/vegetation.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <gridsight/canny.hpp>

namespace gridsight {

namespace {

constexpr double kVerticalSine = 1e-9;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// y on the line rho = x cos(theta) + y sin(theta); requires a
// non-vertical line.
double line_y_at(const HoughLine& l, double x) {
    const double th = deg_to_rad(l.theta_deg);
    return (l.rho - x * std::cos(th)) / std::sin(th);
}

// x at a given y; requires a non-horizontal line.
double line_x_at(const HoughLine& l, double y) {
    const double th = deg_to_rad(l.theta_deg);
    return (l.rho - y * std::sin(th)) / std::cos(th);
}

} // namespace

void FacadeConfig::validate() const {
    if (n_points < 1 || n_points % 2 == 0) {
        throw InvalidArgumentError("FacadeConfig: n_points must be odd and positive");
    }
    if (meter_per_pixel <= 0.0) {
        throw InvalidArgumentError("FacadeConfig: meter_per_pixel must be positive");
    }
}

BitMask green_mask(const RasterRgb& img, const GreenThresholds& t) {
    if (img.empty()) {
        throw InvalidArgumentError("green_mask: empty image");
    }
    if (t.min_th > t.max_th) {
        throw InvalidArgumentError("green_mask: min_th must not exceed max_th");
    }
    BitMask mask(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const Rgb8 p = img.data[i];
        const bool green = p.g > t.gr_th && ((p.r < t.min_th && p.b < t.max_th) ||
                                             (p.b < t.min_th && p.r < t.max_th));
        mask.bits[i] = green ? 1 : 0;
    }
    return mask;
}

std::vector<PointD> facade_points(PointD p, PointD q, int n) {
    if (n < 1 || n % 2 == 0) {
        throw InvalidArgumentError("facade_points: point count must be odd");
    }
    if (p.x == q.x && p.y == q.y) {
        throw DegenerateInputError("facade_points: segment endpoints coincide");
    }
    std::vector<PointD> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) {
        const double f = static_cast<double>(k) / (n + 1);
        pts.push_back({p.x + f * (q.x - p.x), p.y + f * (q.y - p.y)});
    }
    return pts;
}

std::optional<std::pair<PointD, PointD>> clip_line_to_image(const HoughLine& line, int image_w, int image_h) {
    const double th = deg_to_rad(line.theta_deg);
    const double ct = std::cos(th);
    const double st = std::sin(th);
    const PointD p0{line.rho * ct, line.rho * st};
    const PointD d{-st, ct};

    // Liang-Barsky against [0, w-1] x [0, h-1]
    double t0 = -std::numeric_limits<double>::infinity();
    double t1 = std::numeric_limits<double>::infinity();
    bool ok = true;
    auto clip_axis = [&](double denom, double lo, double hi, double start) {
        if (!ok) {
            return;
        }
        if (std::fabs(denom) < 1e-15) {
            if (start < lo || start > hi) {
                ok = false;
            }
            return;
        }
        double ta = (lo - start) / denom;
        double tb = (hi - start) / denom;
        if (ta > tb) {
            std::swap(ta, tb);
        }
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    };
    clip_axis(d.x, 0.0, image_w - 1.0, p0.x);
    clip_axis(d.y, 0.0, image_h - 1.0, p0.y);
    if (!ok || t0 > t1) {
        return std::nullopt;
    }
    PointD a{p0.x + t0 * d.x, p0.y + t0 * d.y};
    PointD b{p0.x + t1 * d.x, p0.y + t1 * d.y};
    if (a.x > b.x || (a.x == b.x && a.y > b.y)) {
        std::swap(a, b);
    }
    return std::make_pair(a, b);
}

std::vector<FacadeSegment> facade_segments(const HoughLine& upper, const HoughLine& lower, int n,
                                           int image_w, int image_h) {
    if (n < 1 || n % 2 == 0) {
        throw InvalidArgumentError("facade_segments: point count must be odd");
    }
    const double st_lower = std::sin(deg_to_rad(lower.theta_deg));
    if (std::fabs(st_lower) < kVerticalSine) {
        throw GeometryError("facade_segments: lower line is vertical, segments never meet it");
    }
    const auto span = clip_line_to_image(upper, image_w, image_h);
    if (!span) {
        throw GeometryError("facade_segments: upper line misses the image");
    }
    const auto pts = facade_points(span->first, span->second, n);
    std::vector<FacadeSegment> segs;
    segs.reserve(pts.size());
    for (const PointD& c : pts) {
        segs.push_back({c.x, c.y, line_y_at(lower, c.x)});
    }
    return segs;
}

double clearance_distance(double tower_x, double middle_segment_x, double meter_per_pixel) {
    if (meter_per_pixel <= 0.0) {
        throw InvalidArgumentError("clearance_distance: meter_per_pixel must be positive");
    }
    return std::fabs(middle_segment_x - tower_x) * meter_per_pixel;
}

ClearanceReport clearance_report(const RasterRgb& img, const FacadeConfig& cfg, const GreenThresholds& t,
                                 const ClearanceParams& params) {
    cfg.validate();
    if (img.empty()) {
        throw InvalidArgumentError("clearance_report: empty image");
    }

    const RasterGray gray = to_gray(img);
    const BitMask edges = canny(gray, params.canny_sigma, params.canny_low, params.canny_high);
    const int min_votes =
        params.min_votes > 0 ? params.min_votes : std::max(1, static_cast<int>(std::lround(0.3 * img.height)));
    const std::vector<HoughLine> lines = hough_lines(edges, params.rho_res, params.theta_res, min_votes);

    ClearanceReport report;
    report.tower_lines = filter_lines_by_angle(lines, 0.0, params.vertical_half_window_deg);
    if (report.tower_lines.empty()) {
        throw GeometryError("clearance_report: no vertical tower line detected");
    }
    const HoughLine tower = report.tower_lines.front();

    BitMask corridor(img.width, img.height);
    for (const double family_center : {params.diag_center_deg, 180.0 - params.diag_center_deg}) {
        const auto family = filter_lines_by_angle(lines, family_center, params.diag_half_window_deg);
        if (family.size() < 2) {
            continue; // side absent
        }
        HoughLine a = family[0];
        HoughLine b = family[1];
        const double mid_x = (img.width - 1) / 2.0;
        if (line_y_at(a, mid_x) > line_y_at(b, mid_x)) {
            std::swap(a, b);
        }
        ClearanceSide side;
        side.upper = a;
        side.lower = b;
        try {
            side.segments = facade_segments(a, b, cfg.n_points, img.width, img.height);
        } catch (const GeometryError&) {
            continue;
        }
        const FacadeSegment& mid = side.segments[(cfg.n_points - 1) / 2];
        const double measure_y = mid.y0 + params.measure_height_frac * (mid.y1 - mid.y0);
        const double tower_x = line_x_at(tower, measure_y);
        side.distance_m = clearance_distance(tower_x, mid.x, cfg.meter_per_pixel);
        side.side = mid.x < tower_x ? "left" : "right";

        // corridor area between the diagonals over the facade span
        const double x_lo = side.segments.front().x;
        const double x_hi = side.segments.back().x;
        const int ix0 = std::clamp(static_cast<int>(std::ceil(std::min(x_lo, x_hi))), 0, img.width - 1);
        const int ix1 = std::clamp(static_cast<int>(std::floor(std::max(x_lo, x_hi))), 0, img.width - 1);
        for (int x = ix0; x <= ix1; ++x) {
            double ya = line_y_at(a, x);
            double yb = line_y_at(b, x);
            if (ya > yb) {
                std::swap(ya, yb);
            }
            const int iy0 = std::clamp(static_cast<int>(std::ceil(ya)), 0, img.height - 1);
            const int iy1 = std::clamp(static_cast<int>(std::floor(yb)), 0, img.height - 1);
            for (int y = iy0; y <= iy1; ++y) {
                corridor.set(x, y);
            }
        }
        report.sides.push_back(std::move(side));
    }

    const std::size_t corridor_px = corridor.count();
    if (corridor_px > 0) {
        const BitMask green = green_mask(img, t);
        std::size_t green_px = 0;
        for (std::size_t i = 0; i < corridor.bits.size(); ++i) {
            if (corridor.bits[i] && green.bits[i]) {
                ++green_px;
            }
        }
        report.green_fraction = static_cast<double>(green_px) / static_cast<double>(corridor_px);
    }
    return report;
}

std::vector<Annotation> clearance_annotations(const ClearanceReport& report, int image_w, int image_h,
                                              double measure_height_frac) {
    const Rgb8 red{255, 0, 0};
    const Rgb8 yellow{255, 255, 0};
    const Rgb8 white{255, 255, 255};
    std::vector<Annotation> shapes;
    auto add_line = [&](const HoughLine& l, Rgb8 color) {
        if (const auto span = clip_line_to_image(l, image_w, image_h)) {
            shapes.push_back(LineAnnotation{static_cast<int>(std::lround(span->first.x)),
                                            static_cast<int>(std::lround(span->first.y)),
                                            static_cast<int>(std::lround(span->second.x)),
                                            static_cast<int>(std::lround(span->second.y)), color});
        }
    };
    for (const HoughLine& l : report.tower_lines) {
        add_line(l, red);
    }
    for (const ClearanceSide& side : report.sides) {
        add_line(side.upper, red);
        add_line(side.lower, red);
        for (const FacadeSegment& s : side.segments) {
            shapes.push_back(LineAnnotation{static_cast<int>(std::lround(s.x)),
                                            static_cast<int>(std::lround(s.y0)),
                                            static_cast<int>(std::lround(s.x)),
                                            static_cast<int>(std::lround(s.y1)), yellow});
        }
        if (!report.tower_lines.empty()) {
            const FacadeSegment& mid = side.segments[side.segments.size() / 2];
            const double measure_y = mid.y0 + measure_height_frac * (mid.y1 - mid.y0);
            const double tower_x = line_x_at(report.tower_lines.front(), measure_y);
            shapes.push_back(LineAnnotation{static_cast<int>(std::lround(tower_x)),
                                            static_cast<int>(std::lround(measure_y)),
                                            static_cast<int>(std::lround(mid.x)),
                                            static_cast<int>(std::lround(measure_y)), white});
        }
    }
    return shapes;
}

} // namespace gridsight
