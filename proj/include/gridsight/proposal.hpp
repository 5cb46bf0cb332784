#pragma once

#include <string>
#include <vector>

#include <gridsight/dft.hpp>
#include <gridsight/dwt.hpp>
#include <gridsight/raster.hpp>

namespace gridsight {

struct Coord {
    int x = 0;
    int y = 0;

    bool operator==(const Coord&) const = default;
};

/// Square window grown around a salient coefficient, one coefficient
/// per step, with the spectral entropy recorded at every radius.
struct RippleState {
    Coord seed;
    int radius = 0;
    std::vector<double> entropy_trace; // entropy_trace[r-1] = h at radius r
    double nfc_seed = 0.0;             // NFC at the seed cell of the final window
};

enum class DetailSubband {
    Vertical,
    Horizontal,
};

/// Candidate region in original-image pixel coordinates.
struct ProposalRegion {
    int x = 0;
    int y = 0;
    int w = 0;
    int h = 0;
    DetailSubband subband = DetailSubband::Vertical;
    Coord seed; // subband coordinates
    double entropy = 0.0;
    double nfc_seed = 0.0;
};

struct ProposalParams {
    Wavelet wavelet = Wavelet::Haar;
    double e_max = 0.05;             // NFC grouping tolerance
    int max_regions = 16;            // per subband
    int max_radius = 32;
    double entropy_plateau_eps = 1e-3;
    int plateau_steps = 3;
    int min_region_px = 64;          // minimum bbox area in image pixels

    void validate() const;
};

/// Unsuppressed coordinate with the maximum absolute coefficient; ties
/// resolve in row-major order.
Coord salient_pixel(const RasterGray& detail, const BitMask& suppressed);

/// Normalized Fourier coefficients: |F| over the root of total spectral
/// energy. Squares sum to one.
std::vector<double> nfc(const Spectrum2D& spec);

/// Spectral entropy sum NFC*log(NFC) over a window, natural log,
/// 0*log(0) = 0. Never positive.
double ripple_entropy(const std::vector<double>& nfc_window);

/// Grows the elastic ripple around the seed: at each radius the window
/// (clipped at the subband borders) is Fourier-transformed, normalized
/// and scored by entropy; growth stops once the entropy change stays
/// below entropy_plateau_eps for plateau_steps consecutive radii, or at
/// max_radius.
RippleState grow_ripple(const RasterGray& detail, Coord seed, const ProposalParams& p);

/// 8-connected flood fill from the seed cell over the final window's
/// NFC map, admitting cells within e_max of the seed's NFC. Returned
/// coordinates are in subband space.
std::vector<Coord> group_by_nfc(const RasterGray& detail, const RippleState& ripple, double e_max);

/// Flood-fill core of group_by_nfc, operating on an explicit NFC map.
std::vector<Coord> flood_fill_nfc(const std::vector<double>& nfc_map, int map_w, int map_h, Coord start,
                                  double e_max);

/// Full proposal pass over the vertical and horizontal detail subbands:
/// repeatedly seed, grow, group, box and suppress, then map boxes to
/// original-image coordinates (x2) and drop those under min_region_px.
std::vector<ProposalRegion> propose_regions(const RasterGray& img, const ProposalParams& p = {});

const char* to_string(DetailSubband s);

} // namespace gridsight
