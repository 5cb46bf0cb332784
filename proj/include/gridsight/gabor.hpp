#pragma once

#include <utility>
#include <vector>

#include <gridsight/convolve.hpp>
#include <gridsight/raster.hpp>

namespace gridsight {

/// Per-pixel texture feature planes: one Gabor magnitude response per
/// (orientation, wavelength) pair, jointly scaled into [0,1], plus X
/// and Y coordinate planes so spatially close pixels group together.
struct GaborFeatureStack {
    int width = 0;
    int height = 0;
    std::vector<RasterGray> channels;

    std::size_t channel_count() const { return channels.size(); }
};

/// Builds the filter bank response stack. Orientations are spaced
/// pi/n_orient apart; each magnitude plane is post-smoothed with a
/// Gaussian of sigma = 0.5 * wavelength. The filters are DC-corrected,
/// so a constant image produces all-zero texture channels. xy_scale
/// weights the two coordinate channels relative to the texture ones.
GaborFeatureStack gabor_bank(const RasterGray& img, int n_orient, const std::vector<double>& wavelengths,
                             double xy_scale = 0.125);

struct PcaProjection {
    /// Dominant eigenvector in channel space; the largest-magnitude
    /// loading is made positive to fix the sign.
    std::vector<double> loadings;
    double eigenvalue = 0.0;
    /// Projection onto the dominant component, min-max normalized.
    RasterGray image;
};

/// Reshapes the stack to (pixels x channels), mean-centers it and
/// projects onto the top covariance eigenvector. k must be 1; the
/// pipeline renders only the dominant component.
PcaProjection pca_project(const GaborFeatureStack& stack, int k = 1);

namespace gabor_detail {

/// Quadrature (cosine/sine) kernel pair for one orientation and
/// wavelength; the cosine kernel is DC-corrected.
std::pair<Kernel2D, Kernel2D> gabor_kernels(double wavelength, double theta_rad);

/// Magnitude of the quadrature response. Large kernels go through a
/// zero-padded spectral product; force_spatial pins the direct route
/// so the two can be compared.
RasterGray quadrature_magnitude(const RasterGray& img, const Kernel2D& even, const Kernel2D& odd,
                                bool force_spatial = false);

} // namespace gabor_detail

} // namespace gridsight
