#include <doctest.h>

#include <cmath>

#include <gridsight/convolve.hpp>
#include <gridsight/dft.hpp>
#include <gridsight/raster.hpp>

#include "oracles.hpp"
#include "synthetic.hpp"

using namespace gridsight;
using testsupport::TestRng;

TEST_SUITE("raster") {

TEST_CASE("to_gray uses the fixed luminance weights") {
    RasterRgb img(3, 1);
    img.at(0, 0) = {255, 255, 255};
    img.at(1, 0) = {0, 0, 0};
    img.at(2, 0) = {255, 0, 0};
    const RasterGray g = to_gray(img);
    CHECK(g.at(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(g.at(1, 0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(g.at(2, 0) == doctest::Approx(0.299).epsilon(1e-12));
}

TEST_CASE("normalize maps extremes to the unit range") {
    RasterGray img(3, 1);
    img.data = {2.0, 4.0, 6.0};
    const RasterGray n = normalize(img);
    CHECK(n.data[0] == doctest::Approx(0.0));
    CHECK(n.data[1] == doctest::Approx(0.5));
    CHECK(n.data[2] == doctest::Approx(1.0));

    RasterGray two(2, 1);
    two.data = {0.0, 9.0};
    const RasterGray n2 = normalize(two);
    CHECK(n2.data[0] == 0.0);
    CHECK(n2.data[1] == 1.0);
}

TEST_CASE("normalize sends constant images to zero") {
    const RasterGray img(4, 4, 5.0);
    const RasterGray n = normalize(img);
    for (const double v : n.data) {
        CHECK(v == 0.0);
    }
}

TEST_CASE("normalize is idempotent on non-constant images") {
    TestRng rng(11);
    const RasterGray img = testsupport::random_gray(9, 7, rng);
    const RasterGray once = normalize(img);
    const RasterGray twice = normalize(once);
    for (std::size_t i = 0; i < once.data.size(); ++i) {
        CHECK(std::fabs(once.data[i] - twice.data[i]) < 1e-12);
        CHECK(once.data[i] >= 0.0);
        CHECK(once.data[i] <= 1.0);
    }
}

TEST_CASE("convolve2d identity kernel") {
    TestRng rng(3);
    const RasterGray img = testsupport::random_gray(6, 5, rng);
    const RasterGray out = convolve2d(img, Kernel2D(1, 1, {1.0}));
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(out.data[i] == img.data[i]);
    }
}

TEST_CASE("convolve2d impulse response with zero border") {
    RasterGray img(5, 5, 0.0);
    img.at(2, 2) = 1.0;
    const Kernel2D ones(3, 3, std::vector<double>(9, 1.0));
    const RasterGray out = convolve2d(img, ones, Border::Zero);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) {
            const bool inside = std::abs(x - 2) <= 1 && std::abs(y - 2) <= 1;
            CHECK(out.at(x, y) == (inside ? 1.0 : 0.0));
        }
    }
}

TEST_CASE("convolve2d matches the direct-sum oracle") {
    TestRng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const RasterGray img = testsupport::random_gray(7, 7, rng);
        std::vector<double> w(9);
        for (double& v : w) {
            v = rng.uniform(-1.0, 1.0);
        }
        const Kernel2D k(3, 3, w);
        for (const Border border : {Border::Replicate, Border::Zero}) {
            const RasterGray got = convolve2d(img, k, border);
            const RasterGray want = testsupport::naive_convolve(img, k, border);
            for (std::size_t i = 0; i < got.data.size(); ++i) {
                CHECK(std::fabs(got.data[i] - want.data[i]) <= 1e-12);
            }
        }
    }
}

TEST_CASE("convolve2d is linear") {
    TestRng rng(23);
    const RasterGray x = testsupport::random_gray(8, 8, rng);
    const RasterGray y = testsupport::random_gray(8, 8, rng);
    std::vector<double> w(25);
    for (double& v : w) {
        v = rng.uniform(-1.0, 1.0);
    }
    const Kernel2D k(5, 5, w);
    const double a = 1.7;
    const double b = -0.4;
    RasterGray mix(8, 8);
    for (std::size_t i = 0; i < mix.data.size(); ++i) {
        mix.data[i] = a * x.data[i] + b * y.data[i];
    }
    const RasterGray lhs = convolve2d(mix, k);
    const RasterGray cx = convolve2d(x, k);
    const RasterGray cy = convolve2d(y, k);
    for (std::size_t i = 0; i < lhs.data.size(); ++i) {
        CHECK(std::fabs(lhs.data[i] - (a * cx.data[i] + b * cy.data[i])) < 1e-10);
    }
}

TEST_CASE("convolve2d rejects even kernels") {
    CHECK_THROWS_AS(Kernel2D(2, 2, std::vector<double>(4, 1.0)), InvalidArgumentError);
}

TEST_CASE("dft2d of a constant image is DC only") {
    const RasterGray img(6, 4, 0.7);
    const Spectrum2D spec = dft2d(img);
    CHECK(std::abs(spec.at(0, 0) - std::complex<double>(24 * 0.7, 0.0)) < 1e-9);
    for (int u = 0; u < spec.rows; ++u) {
        for (int v = 0; v < spec.cols; ++v) {
            if (u != 0 || v != 0) {
                CHECK(std::abs(spec.at(u, v)) < 1e-9);
            }
        }
    }
}

TEST_CASE("dft2d of an origin impulse is flat") {
    RasterGray img(5, 5, 0.0);
    img.at(0, 0) = 1.0;
    const Spectrum2D spec = dft2d(img);
    for (const auto& c : spec.coeffs) {
        CHECK(std::abs(std::abs(c) - 1.0) < 1e-12);
    }
}

TEST_CASE("dft2d matches the naive oracle and inverts") {
    TestRng rng(31);
    const RasterGray img = testsupport::random_gray(16, 16, rng);
    const Spectrum2D got = dft2d(img);
    const Spectrum2D want = testsupport::naive_dft2d(img);
    double ref = 0.0;
    for (const auto& c : want.coeffs) {
        ref = std::max(ref, std::abs(c));
    }
    for (std::size_t i = 0; i < got.coeffs.size(); ++i) {
        CHECK(std::abs(got.coeffs[i] - want.coeffs[i]) <= 1e-9 * ref);
    }
    const RasterGray back = idft2d(got);
    for (std::size_t i = 0; i < img.data.size(); ++i) {
        CHECK(std::fabs(back.data[i] - img.data[i]) <= 1e-9);
    }
}

TEST_CASE("dft2d handles non-power-of-two sizes against the oracle") {
    TestRng rng(37);
    for (const auto [w, h] : {std::pair{9, 9}, std::pair{13, 7}, std::pair{15, 15}}) {
        const RasterGray img = testsupport::random_gray(w, h, rng);
        const Spectrum2D got = dft2d(img);
        const Spectrum2D want = testsupport::naive_dft2d(img);
        double ref = 0.0;
        for (const auto& c : want.coeffs) {
            ref = std::max(ref, std::abs(c));
        }
        for (std::size_t i = 0; i < got.coeffs.size(); ++i) {
            CHECK(std::abs(got.coeffs[i] - want.coeffs[i]) <= 1e-9 * ref);
        }
    }
}

TEST_CASE("Parseval holds") {
    TestRng rng(41);
    const RasterGray img = testsupport::random_gray(12, 10, rng);
    const Spectrum2D spec = dft2d(img);
    double spatial = 0.0;
    for (const double v : img.data) {
        spatial += v * v;
    }
    double spectral = 0.0;
    for (const auto& c : spec.coeffs) {
        spectral += std::norm(c);
    }
    spectral /= static_cast<double>(img.pixel_count());
    CHECK(std::fabs(spatial - spectral) <= 1e-6 * spatial);
}

TEST_CASE("resample_bilinear preserves constants and corners") {
    RasterGray img(4, 4, 0.0);
    for (int y = 0; y < 4; ++y) {
        for (int x = 0; x < 4; ++x) {
            img.at(x, y) = x + 10.0 * y;
        }
    }
    const RasterGray big = resample_bilinear(img, 7, 7);
    CHECK(big.at(0, 0) == doctest::Approx(0.0));
    CHECK(big.at(6, 6) == doctest::Approx(33.0));
    const RasterGray flat = resample_bilinear(RasterGray(5, 5, 0.3), 9, 3);
    for (const double v : flat.data) {
        CHECK(v == doctest::Approx(0.3));
    }
}

} // TEST_SUITE
