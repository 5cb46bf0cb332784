#include <gridsight/raster.hpp>

#include <algorithm>
#include <cmath>

namespace gridsight {

namespace {

void check_dims(int w, int h) {
    if (w < 1 || h < 1) {
        throw InvalidArgumentError("raster dimensions must be at least 1x1");
    }
}

} // namespace

RasterGray::RasterGray(int w, int h, double fill) : width(w), height(h) {
    check_dims(w, h);
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

RasterRgb::RasterRgb(int w, int h, Rgb8 fill) : width(w), height(h) {
    check_dims(w, h);
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

BitMask::BitMask(int w, int h, bool fill) : width(w), height(h) {
    check_dims(w, h);
    bits.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BitMask::count() const {
    return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

RasterGray to_gray(const RasterRgb& img) {
    if (img.empty()) {
        throw InvalidArgumentError("to_gray: empty image");
    }
    RasterGray out(img.width, img.height);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        const Rgb8 p = img.data[i];
        out.data[i] = (0.299 * p.r + 0.587 * p.g + 0.114 * p.b) / 255.0;
    }
    return out;
}

RasterGray normalize(const RasterGray& img) {
    if (img.empty()) {
        throw InvalidArgumentError("normalize: empty image");
    }
    const auto [mn_it, mx_it] = std::minmax_element(img.data.begin(), img.data.end());
    const double mn = *mn_it;
    const double mx = *mx_it;
    RasterGray out(img.width, img.height);
    if (mx == mn) {
        return out; // constant plateau maps to zeros
    }
    const double inv = 1.0 / (mx - mn);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        out.data[i] = (img.data[i] - mn) * inv;
    }
    return out;
}

RasterGray resample_bilinear(const RasterGray& img, int new_w, int new_h) {
    if (img.empty()) {
        throw InvalidArgumentError("resample_bilinear: empty image");
    }
    check_dims(new_w, new_h);
    RasterGray out(new_w, new_h);
    const double sx = new_w > 1 ? static_cast<double>(img.width - 1) / (new_w - 1) : 0.0;
    const double sy = new_h > 1 ? static_cast<double>(img.height - 1) / (new_h - 1) : 0.0;
    for (int y = 0; y < new_h; ++y) {
        const double fy = y * sy;
        const int y0 = std::min(static_cast<int>(fy), img.height - 1);
        const int y1 = std::min(y0 + 1, img.height - 1);
        const double wy = fy - y0;
        for (int x = 0; x < new_w; ++x) {
            const double fx = x * sx;
            const int x0 = std::min(static_cast<int>(fx), img.width - 1);
            const int x1 = std::min(x0 + 1, img.width - 1);
            const double wx = fx - x0;
            const double top = img.at(x0, y0) * (1.0 - wx) + img.at(x1, y0) * wx;
            const double bot = img.at(x0, y1) * (1.0 - wx) + img.at(x1, y1) * wx;
            out.at(x, y) = top * (1.0 - wy) + bot * wy;
        }
    }
    return out;
}

RasterGray crop(const RasterGray& img, int x, int y, int w, int h) {
    if (img.empty()) {
        throw InvalidArgumentError("crop: empty image");
    }
    const int x0 = std::clamp(x, 0, img.width - 1);
    const int y0 = std::clamp(y, 0, img.height - 1);
    const int x1 = std::clamp(x + w, x0 + 1, img.width);
    const int y1 = std::clamp(y + h, y0 + 1, img.height);
    RasterGray out(x1 - x0, y1 - y0);
    for (int yy = y0; yy < y1; ++yy) {
        for (int xx = x0; xx < x1; ++xx) {
            out.at(xx - x0, yy - y0) = img.at(xx, yy);
        }
    }
    return out;
}

std::uint8_t to_u8(double v) {
    const double r = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(r);
}

} // namespace gridsight
