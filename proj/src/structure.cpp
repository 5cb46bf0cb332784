#include <gridsight/structure.hpp>

#include <algorithm>

#include <gridsight/thermal.hpp>

namespace gridsight {

BitMask tower_mask(const RasterGray& pc_image, std::optional<double> threshold) {
    if (pc_image.empty()) {
        throw InvalidArgumentError("tower_mask: empty image");
    }
    BitMask mask(pc_image.width, pc_image.height);
    if (threshold) {
        if (*threshold < 0.0 || *threshold > 1.0) {
            throw InvalidArgumentError("tower_mask: threshold must be in [0,1]");
        }
        for (std::size_t i = 0; i < pc_image.data.size(); ++i) {
            mask.bits[i] = pc_image.data[i] > *threshold ? 1 : 0;
        }
        return mask;
    }
    const int t = otsu_threshold(build_histogram(pc_image));
    for (std::size_t i = 0; i < pc_image.data.size(); ++i) {
        const int bin = std::clamp(static_cast<int>(std::clamp(pc_image.data[i], 0.0, 1.0) * 256.0), 0, 255);
        mask.bits[i] = bin > t ? 1 : 0;
    }
    return mask;
}

RasterGray confine_transfer_lines(const BitMask& edges, const BitMask& towers) {
    if (!edges.same_dims(towers)) {
        throw DimensionMismatchError("confine_transfer_lines: mask dimensions differ");
    }
    RasterGray out(edges.width, edges.height, 1.0);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (towers.bits[i]) {
            out.data[i] = 0.0;
        } else if (edges.bits[i]) {
            out.data[i] = 0.25;
        }
    }
    return out;
}

} // namespace gridsight
