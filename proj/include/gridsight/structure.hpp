#pragma once

#include <optional>

#include <gridsight/raster.hpp>

namespace gridsight {

/// Binarizes a principal-component image. Without an explicit
/// threshold, Otsu's method picks one from the 256-bin histogram.
BitMask tower_mask(const RasterGray& pc_image, std::optional<double> threshold = std::nullopt);

/// Three-level rendering of the confined transfer lines: tower pixels
/// black (0.0), edge pixels dark (0.25), background white (1.0).
RasterGray confine_transfer_lines(const BitMask& edges, const BitMask& towers);

} // namespace gridsight
