#include <gridsight/convolve.hpp>

#include <algorithm>
#include <cmath>

namespace gridsight {

Kernel2D::Kernel2D(int r, int c, std::vector<double> w) : rows(r), cols(c), weights(std::move(w)) {
    if (rows < 1 || cols < 1 || rows % 2 == 0 || cols % 2 == 0) {
        throw InvalidArgumentError("Kernel2D: dimensions must be odd and positive");
    }
    if (weights.size() != static_cast<std::size_t>(rows) * cols) {
        throw InvalidArgumentError("Kernel2D: weight count does not match dimensions");
    }
    for (double v : weights) {
        if (!std::isfinite(v)) {
            throw InvalidArgumentError("Kernel2D: weights must be finite");
        }
    }
}

RasterGray convolve2d(const RasterGray& img, const Kernel2D& k, Border border) {
    if (img.empty()) {
        throw InvalidArgumentError("convolve2d: empty image");
    }
    if (k.rows % 2 == 0 || k.cols % 2 == 0 || k.weights.empty()) {
        throw InvalidArgumentError("convolve2d: kernel dimensions must be odd");
    }
    const int hr = k.rows / 2;
    const int hc = k.cols / 2;
    RasterGray out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int dy = -hr; dy <= hr; ++dy) {
                for (int dx = -hc; dx <= hc; ++dx) {
                    int sx = x + dx;
                    int sy = y + dy;
                    double v;
                    if (sx >= 0 && sx < img.width && sy >= 0 && sy < img.height) {
                        v = img.at(sx, sy);
                    } else if (border == Border::Replicate) {
                        sx = std::clamp(sx, 0, img.width - 1);
                        sy = std::clamp(sy, 0, img.height - 1);
                        v = img.at(sx, sy);
                    } else {
                        v = 0.0;
                    }
                    acc += v * k.at(dx + hc, dy + hr);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

RasterGray gaussian_blur(const RasterGray& img, double sigma) {
    if (img.empty()) {
        throw InvalidArgumentError("gaussian_blur: empty image");
    }
    if (sigma <= 0.0) {
        throw InvalidArgumentError("gaussian_blur: sigma must be positive");
    }
    const int half = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * half + 1));
    double sum = 0.0;
    for (int i = -half; i <= half; ++i) {
        taps[i + half] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += taps[i + half];
    }
    for (double& t : taps) {
        t /= sum;
    }
    RasterGray rows(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                acc += taps[i + half] * img.at(std::clamp(x + i, 0, img.width - 1), y);
            }
            rows.at(x, y) = acc;
        }
    }
    RasterGray out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double acc = 0.0;
            for (int i = -half; i <= half; ++i) {
                acc += taps[i + half] * rows.at(x, std::clamp(y + i, 0, img.height - 1));
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

Kernel2D gaussian_kernel(double sigma, int size) {
    if (sigma <= 0.0) {
        throw InvalidArgumentError("gaussian_kernel: sigma must be positive");
    }
    if (size <= 0) {
        size = 2 * static_cast<int>(std::ceil(3.0 * sigma)) + 1;
    }
    if (size % 2 == 0) {
        ++size;
    }
    const int half = size / 2;
    std::vector<double> w(static_cast<std::size_t>(size) * size);
    double sum = 0.0;
    for (int y = -half; y <= half; ++y) {
        for (int x = -half; x <= half; ++x) {
            const double v = std::exp(-(x * x + y * y) / (2.0 * sigma * sigma));
            w[static_cast<std::size_t>(y + half) * size + (x + half)] = v;
            sum += v;
        }
    }
    for (double& v : w) {
        v /= sum;
    }
    return Kernel2D(size, size, std::move(w));
}

} // namespace gridsight
