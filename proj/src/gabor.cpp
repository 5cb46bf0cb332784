#include <gridsight/gabor.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include <Eigen/Dense>

#include <gridsight/convolve.hpp>
#include <gridsight/dft.hpp>

namespace gridsight {

namespace {

constexpr double kSigmaPerWavelength = 0.56; // ~1 octave bandwidth
constexpr double kAspectRatio = 0.5;
constexpr int kFftKernelThreshold = 31; // kernel side at which FFT wins

} // namespace

namespace gabor_detail {

// The even (cosine) kernel is DC-corrected against its Gaussian envelope.
std::pair<Kernel2D, Kernel2D> gabor_kernels(double wavelength, double theta_rad) {
    const double sigma = kSigmaPerWavelength * wavelength;
    const int half = std::max(2, static_cast<int>(std::ceil(2.5 * sigma)));
    const int size = 2 * half + 1;
    std::vector<double> even(static_cast<std::size_t>(size) * size);
    std::vector<double> odd(static_cast<std::size_t>(size) * size);
    std::vector<double> env(static_cast<std::size_t>(size) * size);
    const double ct = std::cos(theta_rad);
    const double st = std::sin(theta_rad);
    double even_sum = 0.0;
    double env_sum = 0.0;
    for (int y = -half; y <= half; ++y) {
        for (int x = -half; x <= half; ++x) {
            const double xr = x * ct + y * st;
            const double yr = -x * st + y * ct;
            const double g =
                std::exp(-(xr * xr + kAspectRatio * kAspectRatio * yr * yr) / (2.0 * sigma * sigma));
            const double phase = 2.0 * std::numbers::pi * xr / wavelength;
            const std::size_t i = static_cast<std::size_t>(y + half) * size + (x + half);
            env[i] = g;
            even[i] = g * std::cos(phase);
            odd[i] = g * std::sin(phase);
            even_sum += even[i];
            env_sum += g;
        }
    }
    const double dc = even_sum / env_sum;
    for (std::size_t i = 0; i < even.size(); ++i) {
        even[i] -= dc * env[i];
    }
    return {Kernel2D(size, size, std::move(even)), Kernel2D(size, size, std::move(odd))};
}

} // namespace gabor_detail

namespace {

int next_pow2(int n) {
    int m = 1;
    while (m < n) {
        m <<= 1;
    }
    return m;
}

void fft2d_inplace(std::vector<std::complex<double>>& data, int rows, int cols, bool inverse) {
    std::vector<std::complex<double>> line(static_cast<std::size_t>(cols));
    for (int r = 0; r < rows; ++r) {
        std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(r) * cols, cols, line.begin());
        detail::fft(line, inverse);
        std::copy_n(line.begin(), cols, data.begin() + static_cast<std::ptrdiff_t>(r) * cols);
    }
    line.resize(static_cast<std::size_t>(rows));
    for (int c = 0; c < cols; ++c) {
        for (int r = 0; r < rows; ++r) {
            line[r] = data[static_cast<std::size_t>(r) * cols + c];
        }
        detail::fft(line, inverse);
        for (int r = 0; r < rows; ++r) {
            data[static_cast<std::size_t>(r) * cols + c] = line[r];
        }
    }
}

} // namespace

namespace gabor_detail {

// The FFT route replicate-pads the image by the kernel half so both
// paths share the same border semantics.
RasterGray quadrature_magnitude(const RasterGray& img, const Kernel2D& even, const Kernel2D& odd,
                                bool force_spatial) {
    const int size = even.rows;
    if (force_spatial || size < kFftKernelThreshold) {
        const RasterGray re = convolve2d(img, even, Border::Replicate);
        const RasterGray im = convolve2d(img, odd, Border::Replicate);
        RasterGray magn(img.width, img.height);
        for (std::size_t i = 0; i < magn.data.size(); ++i) {
            magn.data[i] = std::hypot(re.data[i], im.data[i]);
        }
        return magn;
    }

    // only the center crop is read back, so wraparound never reaches it
    // as long as the transform covers the replicate-padded extent
    const int half = size / 2;
    const int pad_w = img.width + 2 * half;
    const int pad_h = img.height + 2 * half;
    const int fw = next_pow2(pad_w);
    const int fh = next_pow2(pad_h);

    std::vector<std::complex<double>> field(static_cast<std::size_t>(fw) * fh, 0.0);
    for (int y = 0; y < pad_h; ++y) {
        const int sy = std::clamp(y - half, 0, img.height - 1);
        for (int x = 0; x < pad_w; ++x) {
            const int sx = std::clamp(x - half, 0, img.width - 1);
            field[static_cast<std::size_t>(y) * fw + x] = img.at(sx, sy);
        }
    }
    // kernel centered at the origin with wrapped negative taps, so the
    // product spectrum realizes a centered correlation
    std::vector<std::complex<double>> kern(static_cast<std::size_t>(fw) * fh, 0.0);
    for (int ty = -half; ty <= half; ++ty) {
        const int fy = (ty + fh) % fh;
        for (int tx = -half; tx <= half; ++tx) {
            const int fx = (tx + fw) % fw;
            kern[static_cast<std::size_t>(fy) * fw + fx] = {even.at(tx + half, ty + half),
                                                            odd.at(tx + half, ty + half)};
        }
    }
    fft2d_inplace(field, fh, fw, false);
    fft2d_inplace(kern, fh, fw, false);
    for (std::size_t i = 0; i < field.size(); ++i) {
        field[i] *= kern[i];
    }
    fft2d_inplace(field, fh, fw, true);
    const double scale = 1.0 / (static_cast<double>(fw) * fh);

    RasterGray magn(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            magn.at(x, y) = std::abs(field[static_cast<std::size_t>(y + half) * fw + (x + half)]) * scale;
        }
    }
    return magn;
}

} // namespace gabor_detail

GaborFeatureStack gabor_bank(const RasterGray& img, int n_orient, const std::vector<double>& wavelengths,
                             double xy_scale) {
    if (img.empty()) {
        throw InvalidArgumentError("gabor_bank: empty image");
    }
    if (n_orient < 2) {
        throw InvalidArgumentError("gabor_bank: need at least two orientations");
    }
    if (wavelengths.empty()) {
        throw InvalidArgumentError("gabor_bank: need at least one wavelength");
    }
    for (const double w : wavelengths) {
        if (w <= 0.0) {
            throw InvalidArgumentError("gabor_bank: wavelengths must be positive");
        }
    }

    GaborFeatureStack stack;
    stack.width = img.width;
    stack.height = img.height;
    stack.channels.reserve(static_cast<std::size_t>(n_orient) * wavelengths.size() + 2);

    double global_max = 0.0;
    for (int o = 0; o < n_orient; ++o) {
        const double theta = o * std::numbers::pi / n_orient;
        for (const double lambda : wavelengths) {
            const auto [even, odd] = gabor_detail::gabor_kernels(lambda, theta);
            RasterGray magn = gabor_detail::quadrature_magnitude(img, even, odd);
            magn = gaussian_blur(magn, 0.5 * lambda);
            for (const double v : magn.data) {
                global_max = std::max(global_max, v);
            }
            stack.channels.push_back(std::move(magn));
        }
    }

    // joint scaling keeps relative channel energies comparable
    if (global_max > 1e-12) {
        const double inv = 1.0 / global_max;
        for (RasterGray& c : stack.channels) {
            for (double& v : c.data) {
                v *= inv;
            }
        }
    } else {
        for (RasterGray& c : stack.channels) {
            std::fill(c.data.begin(), c.data.end(), 0.0);
        }
    }

    RasterGray xc(img.width, img.height);
    RasterGray yc(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            xc.at(x, y) = img.width > 1 ? xy_scale * x / (img.width - 1) : 0.0;
            yc.at(x, y) = img.height > 1 ? xy_scale * y / (img.height - 1) : 0.0;
        }
    }
    stack.channels.push_back(std::move(xc));
    stack.channels.push_back(std::move(yc));
    return stack;
}

PcaProjection pca_project(const GaborFeatureStack& stack, int k) {
    if (k != 1) {
        throw InvalidArgumentError("pca_project: the pipeline uses k = 1");
    }
    if (stack.channels.empty()) {
        throw InvalidArgumentError("pca_project: empty feature stack");
    }
    const std::size_t pixels = static_cast<std::size_t>(stack.width) * stack.height;
    const std::size_t n_chan = stack.channels.size();
    if (pixels <= n_chan) {
        throw InvalidArgumentError("pca_project: need more pixels than channels");
    }

    Eigen::MatrixXd x(pixels, n_chan);
    for (std::size_t c = 0; c < n_chan; ++c) {
        for (std::size_t i = 0; i < pixels; ++i) {
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = stack.channels[c].data[i];
        }
    }
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;

    const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(pixels - 1);
    if (cov.trace() < 1e-24) {
        throw DegenerateInputError("pca_project: feature matrix has no variance");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(n_chan) - 1);

    // fix sign: largest-magnitude loading positive
    Eigen::Index max_idx = 0;
    v.cwiseAbs().maxCoeff(&max_idx);
    if (v(max_idx) < 0.0) {
        v = -v;
    }

    PcaProjection out;
    out.eigenvalue = solver.eigenvalues()(static_cast<Eigen::Index>(n_chan) - 1);
    out.loadings.assign(v.data(), v.data() + v.size());

    const Eigen::VectorXd proj = x * v;
    RasterGray img(stack.width, stack.height);
    for (std::size_t i = 0; i < pixels; ++i) {
        img.data[i] = proj(static_cast<Eigen::Index>(i));
    }
    out.image = normalize(img);
    return out;
}

} // namespace gridsight
