#include <gridsight/dft.hpp>

#include <cmath>
#include <memory>
#include <numbers>
#include <unordered_map>

namespace gridsight {

Spectrum2D::Spectrum2D(int n, int m) : rows(n), cols(m) {
    if (n < 1 || m < 1) {
        throw InvalidArgumentError("Spectrum2D: dimensions must be at least 1x1");
    }
    coeffs.assign(static_cast<std::size_t>(n) * m, {});
}

namespace detail {

namespace {

using cd = std::complex<double>;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

int next_pow2(int n) {
    int m = 1;
    while (m < n) {
        m <<= 1;
    }
    return m;
}

// Roots e^{-2*pi*i*k/n} for k < n/2, cached per power-of-two length.
const std::vector<cd>& pow2_roots(int n) {
    thread_local std::unordered_map<int, std::vector<cd>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) {
        return it->second;
    }
    std::vector<cd> roots(static_cast<std::size_t>(n / 2));
    for (int k = 0; k < n / 2; ++k) {
        const double ang = -2.0 * std::numbers::pi * k / n;
        roots[k] = cd(std::cos(ang), std::sin(ang));
    }
    return cache.emplace(n, std::move(roots)).first->second;
}

void fft_pow2(std::vector<cd>& a) {
    const int n = static_cast<int>(a.size());
    if (n <= 1) {
        return;
    }
    const std::vector<cd>& roots = pow2_roots(n);
    // bit-reversal permutation
    for (int i = 1, j = 0; i < n; ++i) {
        int bit = n >> 1;
        for (; j & bit; bit >>= 1) {
            j ^= bit;
        }
        j ^= bit;
        if (i < j) {
            std::swap(a[i], a[j]);
        }
    }
    for (int len = 2; len <= n; len <<= 1) {
        const int stride = n / len;
        for (int i = 0; i < n; i += len) {
            for (int j = 0; j < len / 2; ++j) {
                const cd w = roots[static_cast<std::size_t>(j) * stride];
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
            }
        }
    }
}

struct BluesteinPlan {
    int n = 0;
    int m = 0;
    std::vector<cd> chirp; // e^{-i*pi*k^2/n}
    std::vector<cd> fb;    // FFT of the wrapped conjugate chirp
};

const BluesteinPlan& bluestein_plan(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<BluesteinPlan>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) {
        return *it->second;
    }
    auto plan = std::make_unique<BluesteinPlan>();
    plan->n = n;
    plan->m = next_pow2(2 * n - 1);
    plan->chirp.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        // angle reduced mod 2*pi via k^2 mod 2n to keep precision
        const long long k2 = (static_cast<long long>(k) * k) % (2LL * n);
        const double ang = -std::numbers::pi * static_cast<double>(k2) / n;
        plan->chirp[k] = cd(std::cos(ang), std::sin(ang));
    }
    std::vector<cd> b(static_cast<std::size_t>(plan->m), cd{});
    b[0] = std::conj(plan->chirp[0]);
    for (int k = 1; k < n; ++k) {
        b[k] = std::conj(plan->chirp[k]);
        b[plan->m - k] = b[k];
    }
    fft_pow2(b);
    plan->fb = std::move(b);
    auto& slot = cache[n];
    slot = std::move(plan);
    return *slot;
}

void fft_bluestein(std::vector<cd>& x) {
    const int n = static_cast<int>(x.size());
    const BluesteinPlan& plan = bluestein_plan(n);
    std::vector<cd> a(static_cast<std::size_t>(plan.m), cd{});
    for (int k = 0; k < n; ++k) {
        a[k] = x[k] * plan.chirp[k];
    }
    fft_pow2(a);
    for (int k = 0; k < plan.m; ++k) {
        a[k] *= plan.fb[k];
    }
    // inverse power-of-two FFT via conjugation
    for (cd& v : a) {
        v = std::conj(v);
    }
    fft_pow2(a);
    const double inv_m = 1.0 / plan.m;
    for (int k = 0; k < n; ++k) {
        x[k] = std::conj(a[k]) * inv_m * plan.chirp[k];
    }
}

} // namespace

void fft(std::vector<cd>& a, bool inverse) {
    if (a.size() <= 1) {
        return;
    }
    if (inverse) {
        for (cd& v : a) {
            v = std::conj(v);
        }
    }
    if (is_pow2(static_cast<int>(a.size()))) {
        fft_pow2(a);
    } else {
        fft_bluestein(a);
    }
    if (inverse) {
        for (cd& v : a) {
            v = std::conj(v);
        }
    }
}

} // namespace detail

Spectrum2D dft2d(const RasterGray& img) {
    if (img.empty()) {
        throw InvalidArgumentError("dft2d: empty image");
    }
    const int n = img.height;
    const int m = img.width;
    Spectrum2D spec(n, m);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        spec.coeffs[i] = img.data[i];
    }
    std::vector<std::complex<double>> line;
    // rows
    line.resize(static_cast<std::size_t>(m));
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < m; ++v) {
            line[v] = spec.at(u, v);
        }
        detail::fft(line, false);
        for (int v = 0; v < m; ++v) {
            spec.at(u, v) = line[v];
        }
    }
    // columns
    line.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < m; ++v) {
        for (int u = 0; u < n; ++u) {
            line[u] = spec.at(u, v);
        }
        detail::fft(line, false);
        for (int u = 0; u < n; ++u) {
            spec.at(u, v) = line[u];
        }
    }
    return spec;
}

RasterGray idft2d(const Spectrum2D& spec) {
    if (spec.coeffs.empty()) {
        throw InvalidArgumentError("idft2d: empty spectrum");
    }
    const int n = spec.rows;
    const int m = spec.cols;
    std::vector<std::complex<double>> work = spec.coeffs;
    std::vector<std::complex<double>> line(static_cast<std::size_t>(m));
    for (int u = 0; u < n; ++u) {
        for (int v = 0; v < m; ++v) {
            line[v] = work[static_cast<std::size_t>(u) * m + v];
        }
        detail::fft(line, true);
        for (int v = 0; v < m; ++v) {
            work[static_cast<std::size_t>(u) * m + v] = line[v];
        }
    }
    line.resize(static_cast<std::size_t>(n));
    for (int v = 0; v < m; ++v) {
        for (int u = 0; u < n; ++u) {
            line[u] = work[static_cast<std::size_t>(u) * m + v];
        }
        detail::fft(line, true);
        for (int u = 0; u < n; ++u) {
            work[static_cast<std::size_t>(u) * m + v] = line[u];
        }
    }
    RasterGray out(m, n);
    const double scale = 1.0 / (static_cast<double>(n) * m);
    for (std::size_t i = 0; i < work.size(); ++i) {
        out.data[i] = work[i].real() * scale;
    }
    return out;
}

} // namespace gridsight
