#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <gridsight/raster.hpp>

namespace gridsight {

/// 256-bin intensity histogram over [0,1].
struct Histogram256 {
    std::array<std::uint64_t, 256> counts{};

    std::uint64_t total() const;
    int occupied_bins() const;
};

/// Quantizes intensities (clamped to [0,1]) into 256 uniform bins.
Histogram256 build_histogram(const RasterGray& img);

struct ThermalOptions {
    /// When true the 3x3 pre-sum counts the center pixel once (the
    /// nine-term sum of the summation formula); when false only the
    /// eight surrounding pixels are added.
    bool center_included = true;
    /// Gradient-magnitude threshold for edge exposure, as a fraction of
    /// the maximum gradient.
    double edge_threshold = 0.1;
};

/// 3x3 neighborhood pre-sum with replicate border. Sharpens intensity
/// differences between neighboring pixels ahead of thresholding.
RasterGray neighborhood_sum(const RasterGray& img, bool center_included = true);

/// Threshold level in [0,255] maximizing the between-class variance.
/// Plateaus of maximizers resolve to the midpoint (rounded down).
int otsu_threshold(const Histogram256& h);

/// Full hotspot pipeline: neighborhood pre-sum, min-max normalization,
/// histogram, Otsu. Pixels in bins above the threshold are set.
BitMask extract_hotspots(const RasterGray& img, const ThermalOptions& opts = {});

/// Renders hotspots at full intensity and the edges of other structures
/// (central-difference gradient above threshold) at mid intensity.
RasterGray expose_neighbor_edges(const RasterGray& img, const BitMask& hotspots,
                                 double edge_threshold = 0.1);

struct MaskComponent {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    std::size_t pixels = 0;
};

/// 8-connected components of a mask, largest first.
std::vector<MaskComponent> mask_components(const BitMask& mask);

} // namespace gridsight
