#pragma once

#include <gridsight/raster.hpp>

namespace gridsight {

/// Canny edge detection: Gaussian smoothing, central-difference
/// gradient, non-maximum suppression with 8-direction quantization,
/// hysteresis linking. Thresholds are fractions of the maximum gradient
/// magnitude, 0 < t_low < t_high <= 1.
BitMask canny(const RasterGray& img, double sigma = 1.4, double t_low = 0.1, double t_high = 0.3);

} // namespace gridsight
