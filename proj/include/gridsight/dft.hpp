#pragma once

#include <complex>
#include <vector>

#include <gridsight/raster.hpp>

namespace gridsight {

/// 2D spectrum. rows = N (vertical sample count), cols = M. coeffs are
/// row-major: coeffs[u * cols + v] holds F(u,v).
struct Spectrum2D {
    int rows = 0;
    int cols = 0;
    std::vector<std::complex<double>> coeffs;

    Spectrum2D() = default;
    Spectrum2D(int n, int m);

    std::complex<double>& at(int u, int v) { return coeffs[static_cast<std::size_t>(u) * cols + v]; }
    std::complex<double> at(int u, int v) const { return coeffs[static_cast<std::size_t>(u) * cols + v]; }
};

/// Unnormalized forward 2D DFT:
///   F(u,v) = sum_{y,x} f(x,y) exp(-2*pi*i*(u*y/N + v*x/M)).
/// No implicit padding; the transform size is exactly the image size.
Spectrum2D dft2d(const RasterGray& img);

/// Inverse of dft2d; divides by N*M and returns the real part.
RasterGray idft2d(const Spectrum2D& spec);

namespace detail {

/// In-place 1D DFT of arbitrary length (radix-2 when possible,
/// Bluestein otherwise). inverse=true applies the conjugate transform
/// without the 1/n factor.
void fft(std::vector<std::complex<double>>& a, bool inverse);

} // namespace detail

} // namespace gridsight
