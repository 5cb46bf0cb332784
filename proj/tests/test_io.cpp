#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gridsight/image_io.hpp>

#include "synthetic.hpp"

using namespace gridsight;
using testsupport::TestRng;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("gridsight_io_" + name)).string();
}

} // namespace

TEST_SUITE("image_io") {

TEST_CASE("png round trip is lossless") {
    TestRng rng(5);
    const RasterRgb img = testsupport::random_rgb(23, 17, rng);
    const std::string path = temp_path("roundtrip.png");
    save_png(img, path);
    const RasterRgb back = load_image(path);
    REQUIRE(back.width == img.width);
    REQUIRE(back.height == img.height);
    CHECK(back.data == img.data);
    std::filesystem::remove(path);
}

TEST_CASE("pnm round trip is lossless") {
    TestRng rng(6);
    const RasterRgb img = testsupport::random_rgb(9, 11, rng);
    const std::string path = temp_path("roundtrip.ppm");
    save_pnm(img, path);
    const RasterRgb back = load_image(path);
    CHECK(back.data == img.data);
    std::filesystem::remove(path);

    RasterGray gray(7, 5);
    for (std::size_t i = 0; i < gray.data.size(); ++i) {
        gray.data[i] = static_cast<double>(i) / gray.data.size();
    }
    const std::string gpath = temp_path("roundtrip.pgm");
    save_pnm(gray, gpath);
    const RasterRgb gback = load_image(gpath);
    for (std::size_t i = 0; i < gray.data.size(); ++i) {
        CHECK(gback.data[i].r == to_u8(gray.data[i]));
        CHECK(gback.data[i].r == gback.data[i].g);
    }
    std::filesystem::remove(gpath);
}

TEST_CASE("missing file raises MissingFileError") {
    CHECK_THROWS_AS(load_image("/nonexistent/path/image.png"), MissingFileError);
}

TEST_CASE("unsupported extension raises UnsupportedFormatError") {
    const std::string path = temp_path("data.tiff");
    std::ofstream(path) << "x";
    CHECK_THROWS_AS(load_image(path), UnsupportedFormatError);
    std::filesystem::remove(path);
}

TEST_CASE("garbage png raises MalformedHeaderError") {
    const std::string path = temp_path("garbage.png");
    std::ofstream(path) << "this is not a png";
    CHECK_THROWS_AS(load_image(path), MalformedHeaderError);
    std::filesystem::remove(path);
}

TEST_CASE("bad pnm maxval raises MalformedHeaderError") {
    const std::string path = temp_path("bad.pgm");
    std::ofstream(path) << "P5\n4 4\n65535\n";
    CHECK_THROWS_AS(load_image(path), MalformedHeaderError);
    std::filesystem::remove(path);
}

TEST_CASE("box overlay recolors exactly the perimeter") {
    RasterRgb img(10, 10, {0, 0, 0});
    std::vector<Annotation> shapes{BoxAnnotation{2, 3, 5, 4, {255, 0, 0}}};
    draw_annotations(img, shapes);
    // perimeter pixels of [2..6] x [3..6]
    int red_count = 0;
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 10; ++x) {
            const bool on_perimeter = (x >= 2 && x <= 6 && (y == 3 || y == 6)) ||
                                      (y >= 3 && y <= 6 && (x == 2 || x == 6));
            const bool is_red = img.at(x, y).r == 255;
            CHECK(is_red == on_perimeter);
            red_count += is_red ? 1 : 0;
        }
    }
    CHECK(red_count == 2 * 5 + 2 * 2);
}

TEST_CASE("mask and line overlays recolor their pixels") {
    RasterRgb img(8, 8, {10, 10, 10});
    BitMask mask(8, 8);
    mask.set(1, 1);
    mask.set(2, 2);
    std::vector<Annotation> shapes{MaskAnnotation{mask, {0, 255, 0}},
                                   LineAnnotation{0, 7, 7, 0, {0, 0, 255}}};
    draw_annotations(img, shapes);
    CHECK(img.at(1, 1).g == 255);
    CHECK(img.at(2, 2).g == 255);
    CHECK(img.at(0, 7).b == 255);
    CHECK(img.at(7, 0).b == 255);
    CHECK(img.at(3, 4).b == 255); // on the diagonal
}

} // TEST_SUITE
