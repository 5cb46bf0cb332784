#pragma once

#include <gridsight/raster.hpp>

namespace gridsight {

enum class Wavelet {
    Haar,
    Db2,
};

/// Level-1 2D DWT output. Subband naming follows the separable filter
/// order: the vertical detail is row-lowpass then column-highpass, the
/// horizontal detail is row-highpass then column-lowpass. Each subband
/// is ceil(W/2) x ceil(H/2); odd extents are replicate-padded by one
/// sample before the periodized filter bank, which keeps the transform
/// exactly invertible at these sizes.
struct SubbandSet {
    int source_width = 0;
    int source_height = 0;
    RasterGray approx;
    RasterGray vertical;
    RasterGray horizontal;
    RasterGray diagonal;
};

/// Separable analysis bank with downsampling by two.
SubbandSet dwt2_level1(const RasterGray& img, Wavelet wavelet = Wavelet::Haar);

/// Synthesis bank; reconstructs the source image exactly (up to
/// floating-point roundoff).
RasterGray idwt2_level1(const SubbandSet& bands, Wavelet wavelet = Wavelet::Haar);

} // namespace gridsight
