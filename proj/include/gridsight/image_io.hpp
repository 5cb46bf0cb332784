#pragma once

#include <string>
#include <variant>
#include <vector>

#include <gridsight/raster.hpp>

namespace gridsight {

struct BoxAnnotation {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    Rgb8 color;
};

struct LineAnnotation {
    int x0 = 0;
    int y0 = 0;
    int x1 = 0;
    int y1 = 0;
    Rgb8 color;
};

struct MaskAnnotation {
    BitMask mask;
    Rgb8 color;
};

using Annotation = std::variant<BoxAnnotation, LineAnnotation, MaskAnnotation>;

/// Reads a PNG, PPM or PGM file; grayscale sources are expanded to RGB.
RasterRgb load_image(const std::string& path);

void save_png(const RasterRgb& img, const std::string& path);
void save_png(const RasterGray& img, const std::string& path);
void save_pnm(const RasterRgb& img, const std::string& path); // binary PPM (P6)
void save_pnm(const RasterGray& img, const std::string& path); // binary PGM (P5)

/// Boxes draw their one-pixel perimeter, lines are Bresenham strokes,
/// masks recolor every set pixel. Shapes are applied in order.
void draw_annotations(RasterRgb& img, const std::vector<Annotation>& shapes);

/// Copies the image, draws the shapes and writes a PNG.
void save_overlay(const RasterRgb& img, const std::vector<Annotation>& shapes, const std::string& path);

/// Grayscale-to-RGB expansion (values clamped to [0,1] then quantized).
RasterRgb gray_to_rgb(const RasterGray& img);

/// Mask to black/white grayscale image.
RasterGray mask_to_gray(const BitMask& mask);

} // namespace gridsight
