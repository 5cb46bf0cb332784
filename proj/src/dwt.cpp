#include <gridsight/dwt.hpp>

#include <array>
#include <cmath>
#include <vector>

namespace gridsight {

namespace {

struct FilterPair {
    std::vector<double> lo; // scaling filter
    std::vector<double> hi; // wavelet filter, hi[m] = (-1)^m lo[L-1-m]
};

FilterPair filters_for(Wavelet w) {
    FilterPair f;
    if (w == Wavelet::Haar) {
        const double r = 1.0 / std::sqrt(2.0);
        f.lo = {r, r};
    } else {
        const double s3 = std::sqrt(3.0);
        const double n = 4.0 * std::sqrt(2.0);
        f.lo = {(1.0 + s3) / n, (3.0 + s3) / n, (3.0 - s3) / n, (1.0 - s3) / n};
    }
    const std::size_t len = f.lo.size();
    f.hi.resize(len);
    for (std::size_t m = 0; m < len; ++m) {
        f.hi[m] = (m % 2 == 0 ? 1.0 : -1.0) * f.lo[len - 1 - m];
    }
    return f;
}

// Periodized analysis step. Odd inputs are replicate-padded by one
// sample so every subband length is ceil(n/2).
void analyze_1d(const std::vector<double>& x, const FilterPair& f, std::vector<double>& lo,
                std::vector<double>& hi) {
    const int n = static_cast<int>(x.size());
    const int np = n + (n % 2);
    const int half = np / 2;
    const int flen = static_cast<int>(f.lo.size());
    lo.assign(static_cast<std::size_t>(half), 0.0);
    hi.assign(static_cast<std::size_t>(half), 0.0);
    auto sample = [&](int i) { return x[static_cast<std::size_t>(std::min(i % np, n - 1))]; };
    for (int k = 0; k < half; ++k) {
        double a = 0.0;
        double d = 0.0;
        for (int m = 0; m < flen; ++m) {
            const double v = sample(2 * k + m);
            a += f.lo[m] * v;
            d += f.hi[m] * v;
        }
        lo[k] = a;
        hi[k] = d;
    }
}

// Transpose of analyze_1d; returns the padded even-length signal.
void synthesize_1d(const std::vector<double>& lo, const std::vector<double>& hi, const FilterPair& f,
                   std::vector<double>& out) {
    const int half = static_cast<int>(lo.size());
    const int np = 2 * half;
    const int flen = static_cast<int>(f.lo.size());
    out.assign(static_cast<std::size_t>(np), 0.0);
    for (int k = 0; k < half; ++k) {
        for (int m = 0; m < flen; ++m) {
            const int i = (2 * k + m) % np;
            out[i] += lo[k] * f.lo[m] + hi[k] * f.hi[m];
        }
    }
}

} // namespace

SubbandSet dwt2_level1(const RasterGray& img, Wavelet wavelet) {
    if (img.width < 2 || img.height < 2) {
        throw InvalidArgumentError("dwt2_level1: image must be at least 2x2");
    }
    const FilterPair f = filters_for(wavelet);
    const int w2 = (img.width + 1) / 2;
    const int h2 = (img.height + 1) / 2;

    // rows first
    RasterGray row_lo(w2, img.height);
    RasterGray row_hi(w2, img.height);
    std::vector<double> line(static_cast<std::size_t>(img.width));
    std::vector<double> lo;
    std::vector<double> hi;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            line[x] = img.at(x, y);
        }
        analyze_1d(line, f, lo, hi);
        for (int x = 0; x < w2; ++x) {
            row_lo.at(x, y) = lo[x];
            row_hi.at(x, y) = hi[x];
        }
    }

    SubbandSet bands;
    bands.source_width = img.width;
    bands.source_height = img.height;
    bands.approx = RasterGray(w2, h2);
    bands.vertical = RasterGray(w2, h2);
    bands.horizontal = RasterGray(w2, h2);
    bands.diagonal = RasterGray(w2, h2);

    // columns; the vertical detail is row-lowpass then column-highpass
    line.resize(static_cast<std::size_t>(img.height));
    for (int x = 0; x < w2; ++x) {
        for (int y = 0; y < img.height; ++y) {
            line[y] = row_lo.at(x, y);
        }
        analyze_1d(line, f, lo, hi);
        for (int y = 0; y < h2; ++y) {
            bands.approx.at(x, y) = lo[y];
            bands.vertical.at(x, y) = hi[y];
        }
        for (int y = 0; y < img.height; ++y) {
            line[y] = row_hi.at(x, y);
        }
        analyze_1d(line, f, lo, hi);
        for (int y = 0; y < h2; ++y) {
            bands.horizontal.at(x, y) = lo[y];
            bands.diagonal.at(x, y) = hi[y];
        }
    }
    return bands;
}

RasterGray idwt2_level1(const SubbandSet& bands, Wavelet wavelet) {
    const int w = bands.source_width;
    const int h = bands.source_height;
    const int w2 = bands.approx.width;
    const int h2 = bands.approx.height;
    if (w2 != (w + 1) / 2 || h2 != (h + 1) / 2 || !bands.approx.same_dims(bands.vertical) ||
        !bands.approx.same_dims(bands.horizontal) || !bands.approx.same_dims(bands.diagonal)) {
        throw DimensionMismatchError("idwt2_level1: inconsistent subband dimensions");
    }
    const FilterPair f = filters_for(wavelet);

    // invert columns
    RasterGray row_lo(w2, h);
    RasterGray row_hi(w2, h);
    std::vector<double> lo(static_cast<std::size_t>(h2));
    std::vector<double> hi(static_cast<std::size_t>(h2));
    std::vector<double> full;
    for (int x = 0; x < w2; ++x) {
        for (int y = 0; y < h2; ++y) {
            lo[y] = bands.approx.at(x, y);
            hi[y] = bands.vertical.at(x, y);
        }
        synthesize_1d(lo, hi, f, full);
        for (int y = 0; y < h; ++y) {
            row_lo.at(x, y) = full[y];
        }
        for (int y = 0; y < h2; ++y) {
            lo[y] = bands.horizontal.at(x, y);
            hi[y] = bands.diagonal.at(x, y);
        }
        synthesize_1d(lo, hi, f, full);
        for (int y = 0; y < h; ++y) {
            row_hi.at(x, y) = full[y];
        }
    }

    // invert rows
    RasterGray out(w, h);
    lo.resize(static_cast<std::size_t>(w2));
    hi.resize(static_cast<std::size_t>(w2));
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w2; ++x) {
            lo[x] = row_lo.at(x, y);
            hi[x] = row_hi.at(x, y);
        }
        synthesize_1d(lo, hi, f, full);
        for (int x = 0; x < w; ++x) {
            out.at(x, y) = full[x];
        }
    }
    return out;
}

} // namespace gridsight
