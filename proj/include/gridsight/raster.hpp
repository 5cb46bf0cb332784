#pragma once

#include <cstdint>
#include <vector>

#include <gridsight/error.hpp>

namespace gridsight {

/// Single-channel image. Intensities are double precision and nominally
/// in [0,1]; 8-bit values exist only at the I/O boundary. The same
/// container carries wavelet coefficient planes, which may leave [0,1].
struct RasterGray {
    int width = 0;
    int height = 0;
    std::vector<double> data; // row-major, data[y * width + x]

    RasterGray() = default;
    RasterGray(int w, int h, double fill = 0.0);

    double& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const { return data.size(); }
    bool same_dims(const RasterGray& o) const { return width == o.width && height == o.height; }
};

struct Rgb8 {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    bool operator==(const Rgb8&) const = default;
};

/// Three-channel 8-bit image, row-major.
struct RasterRgb {
    int width = 0;
    int height = 0;
    std::vector<Rgb8> data;

    RasterRgb() = default;
    RasterRgb(int w, int h, Rgb8 fill = {});

    Rgb8& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    Rgb8 at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    bool empty() const { return data.empty(); }
    std::size_t pixel_count() const { return data.size(); }
};

/// Boolean per-pixel mask with the dimensions of its source image.
struct BitMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits; // 0 or 1, row-major

    BitMask() = default;
    BitMask(int w, int h, bool fill = false);

    void set(int x, int y, bool v = true) { bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0; }
    bool get(int x, int y) const { return bits[static_cast<std::size_t>(y) * width + x] != 0; }

    std::size_t count() const;
    bool same_dims(const BitMask& o) const { return width == o.width && height == o.height; }
};

/// Rec. 601 luminance, mapped to [0,1].
RasterGray to_gray(const RasterRgb& img);

/// Min-max rescale to [0,1]; a constant image maps to all zeros.
RasterGray normalize(const RasterGray& img);

/// Bilinear resampling to new_w x new_h.
RasterGray resample_bilinear(const RasterGray& img, int new_w, int new_h);

/// Copy of the axis-aligned window, clipped against the image bounds.
RasterGray crop(const RasterGray& img, int x, int y, int w, int h);

/// Quantize [0,1] intensities to 8 bits (round, clamp).
std::uint8_t to_u8(double v);

} // namespace gridsight
