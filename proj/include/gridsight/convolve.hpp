#pragma once

#include <vector>

#include <gridsight/raster.hpp>

namespace gridsight {

/// Small dense filter with odd dimensions.
struct Kernel2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> weights; // row-major

    Kernel2D() = default;
    Kernel2D(int r, int c, std::vector<double> w);

    double at(int col, int row) const { return weights[static_cast<std::size_t>(row) * cols + col]; }
};

enum class Border {
    Replicate,
    Zero,
};

/// Correlation of the kernel over the image (no kernel flip; every
/// kernel used here is symmetric). Output has the input's dimensions.
RasterGray convolve2d(const RasterGray& img, const Kernel2D& k, Border border = Border::Replicate);

/// Normalized Gaussian, size 2*ceil(3*sigma)+1 unless given.
Kernel2D gaussian_kernel(double sigma, int size = 0);

/// Gaussian smoothing as two 1D passes (replicate border); equal to
/// convolving with gaussian_kernel(sigma) up to roundoff but linear in
/// the kernel size.
RasterGray gaussian_blur(const RasterGray& img, double sigma);

} // namespace gridsight
