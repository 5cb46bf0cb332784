#pragma once

#include <optional>
#include <string>
#include <vector>

#include <gridsight/hough.hpp>
#include <gridsight/image_io.hpp>
#include <gridsight/raster.hpp>

namespace gridsight {

/// Channel thresholds of the green-extraction heuristic: a pixel is
/// green when Gr > gr_th and one of red/blue is under min_th while the
/// other stays under max_th.
struct GreenThresholds {
    int gr_th = 100;
    int min_th = 80;
    int max_th = 150;
};

struct FacadeConfig {
    int n_points = 5;            // odd number of facade segments
    double meter_per_pixel = 1.0; // ground sampling distance

    void validate() const;
};

struct PointD {
    double x = 0.0;
    double y = 0.0;
};

/// One vertical facade segment from the upper to the lower diagonal.
struct FacadeSegment {
    double x = 0.0;
    double y0 = 0.0; // on the upper line
    double y1 = 0.0; // on the lower line
};

struct ClearanceSide {
    std::string side; // "left" or "right" of the tower line
    HoughLine upper;
    HoughLine lower;
    std::vector<FacadeSegment> segments;
    double distance_m = 0.0;
};

struct ClearanceReport {
    std::vector<HoughLine> tower_lines;
    std::vector<ClearanceSide> sides;
    double green_fraction = 0.0;
};

struct ClearanceParams {
    double canny_sigma = 1.4;
    double canny_low = 0.1;
    double canny_high = 0.3;
    double rho_res = 1.0;
    double theta_res = 1.0;
    int min_votes = 0; // 0 selects 0.3 * image height
    double vertical_half_window_deg = 10.0;
    double diag_center_deg = 45.0; // mirrored family at 135
    double diag_half_window_deg = 15.0;
    double measure_height_frac = 0.5; // where along the middle segment to measure
};

/// Exact per-pixel evaluation of the green heuristic.
BitMask green_mask(const RasterRgb& img, const GreenThresholds& t = {});

/// n interior points equally spaced on segment PQ (endpoints excluded):
/// C_k = P + k * (Q - P) / (n + 1).
std::vector<PointD> facade_points(PointD p_upper, PointD q_upper, int n);

/// Drops a vertical segment from each facade point on the upper
/// diagonal to the lower diagonal. The upper line's extent is its
/// intersection with the image borders.
std::vector<FacadeSegment> facade_segments(const HoughLine& upper, const HoughLine& lower, int n,
                                           int image_w, int image_h);

/// Pixel separation converted to meters.
double clearance_distance(double tower_x, double middle_segment_x, double meter_per_pixel);

/// Full corridor measurement: Canny, Hough, line-family split, facade
/// construction and per-side distance, plus the green fraction of the
/// corridor area.
ClearanceReport clearance_report(const RasterRgb& img, const FacadeConfig& cfg,
                                 const GreenThresholds& t = {}, const ClearanceParams& params = {});

/// Fig-style overlay: tower and diagonal lines red, facade segments
/// yellow, measurement lines white.
std::vector<Annotation> clearance_annotations(const ClearanceReport& report, int image_w, int image_h,
                                              double measure_height_frac = 0.5);

/// Endpoints of a Hough line clipped to the image rectangle; empty when
/// the line misses the frame.
std::optional<std::pair<PointD, PointD>> clip_line_to_image(const HoughLine& line, int image_w, int image_h);

} // namespace gridsight
