#include <doctest.h>

#include <cmath>

#include <gridsight/proposal.hpp>

#include "oracles.hpp"
#include "synthetic.hpp"

using namespace gridsight;
using testsupport::TestRng;

TEST_SUITE("proposal") {

TEST_CASE("salient_pixel finds the unique maximum") {
    RasterGray detail(8, 8, 0.0);
    detail.at(5, 3) = -0.7;
    const Coord c = salient_pixel(detail, BitMask(8, 8));
    CHECK(c == Coord{5, 3});
}

TEST_CASE("salient_pixel breaks ties in row-major order") {
    RasterGray detail(4, 4, 0.0);
    detail.at(1, 0) = 0.5;
    detail.at(0, 2) = -0.5;
    CHECK(salient_pixel(detail, BitMask(4, 4)) == Coord{1, 0});
}

TEST_CASE("salient_pixel matches a linear scan with suppression") {
    TestRng rng(61);
    const RasterGray detail = testsupport::random_gray(12, 9, rng);
    BitMask suppressed(12, 9);
    for (int i = 0; i < 30; ++i) {
        suppressed.set(static_cast<int>(rng.next() % 12), static_cast<int>(rng.next() % 9));
    }
    double best = -1.0;
    Coord want;
    for (int y = 0; y < 9; ++y) {
        for (int x = 0; x < 12; ++x) {
            if (!suppressed.get(x, y) && std::fabs(detail.at(x, y)) > best) {
                best = std::fabs(detail.at(x, y));
                want = {x, y};
            }
        }
    }
    CHECK(salient_pixel(detail, suppressed) == want);
}

TEST_CASE("salient_pixel with everything suppressed is exhausted") {
    CHECK_THROWS_AS(salient_pixel(RasterGray(4, 4, 1.0), BitMask(4, 4, true)), ExhaustedError);
}

TEST_CASE("nfc normalizes spectral magnitudes") {
    Spectrum2D one(2, 2);
    one.at(1, 1) = {3.0, 4.0};
    const auto values = nfc(one);
    CHECK(values[3] == doctest::Approx(1.0));
    CHECK(values[0] == 0.0);

    Spectrum2D flat(2, 2);
    flat.at(0, 0) = {1.0, 0.0};
    flat.at(0, 1) = {0.0, 1.0};
    flat.at(1, 0) = {-1.0, 0.0};
    flat.at(1, 1) = {0.0, -1.0};
    for (const double v : nfc(flat)) {
        CHECK(v == doctest::Approx(0.5));
    }
}

TEST_CASE("nfc matches the direct formula and sums to one in square") {
    TestRng rng(67);
    Spectrum2D spec(4, 4);
    for (auto& c : spec.coeffs) {
        c = {rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)};
    }
    const auto got = nfc(spec);
    const auto want = testsupport::nfc_direct(spec);
    double sq = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(std::fabs(got[i] - want[i]) <= 1e-12);
        CHECK(got[i] >= 0.0);
        CHECK(got[i] <= 1.0);
        sq += got[i] * got[i];
    }
    CHECK(std::fabs(sq - 1.0) <= 1e-9);
}

TEST_CASE("nfc rejects an all-zero spectrum") {
    CHECK_THROWS_AS(nfc(Spectrum2D(3, 3)), DegenerateInputError);
}

TEST_CASE("ripple_entropy of a pure tone is zero") {
    CHECK(ripple_entropy({1.0, 0.0, 0.0, 0.0}) == 0.0);
}

TEST_CASE("ripple_entropy of the uniform 2x2 window") {
    CHECK(ripple_entropy({0.5, 0.5, 0.5, 0.5}) == doctest::Approx(-1.3863).epsilon(1e-4));
}

TEST_CASE("ripple_entropy matches direct summation and is never positive") {
    TestRng rng(71);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> values(16);
        double total = 0.0;
        for (double& v : values) {
            v = rng.uniform();
            total += v * v;
        }
        for (double& v : values) {
            v /= std::sqrt(total);
        }
        const double got = ripple_entropy(values);
        CHECK(std::fabs(got - testsupport::entropy_direct(values)) <= 1e-12);
        CHECK(got <= 0.0);
    }
}

TEST_CASE("grow_ripple on an isolated impulse runs to max_radius") {
    RasterGray detail(80, 80, 0.0);
    detail.at(40, 40) = 1.0;
    ProposalParams p;
    p.max_radius = 12;
    const RippleState state = grow_ripple(detail, {40, 40}, p);
    CHECK(state.radius == 12);
    REQUIRE(state.entropy_trace.size() == 12);
    for (int r = 1; r <= 12; ++r) {
        const double n = 2.0 * r + 1.0;
        CHECK(state.entropy_trace[r - 1] == doctest::Approx(-n * std::log(n)).epsilon(1e-9));
    }
}

TEST_CASE("grow_ripple on a constant field stops after the plateau") {
    const RasterGray detail(64, 64, 0.4);
    ProposalParams p; // plateau_steps = 3
    const RippleState state = grow_ripple(detail, {30, 30}, p);
    CHECK(state.radius == p.plateau_steps + 1);
    for (const double h : state.entropy_trace) {
        CHECK(std::fabs(h) < 1e-9);
    }
}

TEST_CASE("grow_ripple stop radius covers a constant-signature patch") {
    // 9x9 patch of constant coefficients with a boosted center; the
    // plateau fires while the window is still inside the patch
    RasterGray detail(48, 48, 0.0);
    for (int y = 16; y < 25; ++y) {
        for (int x = 16; x < 25; ++x) {
            detail.at(x, y) = 0.5;
        }
    }
    detail.at(20, 20) = 0.5 * (1.0 + 1e-4);
    ProposalParams p;
    const Coord seed = salient_pixel(detail, BitMask(48, 48));
    CHECK(seed == Coord{20, 20});
    const RippleState state = grow_ripple(detail, seed, p);
    const int patch_half = 4;
    CHECK(std::abs(state.radius - patch_half) <= 2);
}

TEST_CASE("flood_fill_nfc groups a uniform window entirely") {
    const std::vector<double> map(25, 0.3);
    const auto cells = flood_fill_nfc(map, 5, 5, {2, 2}, 0.01);
    CHECK(cells.size() == 25);
}

TEST_CASE("flood_fill_nfc with zero tolerance keeps only the seed") {
    std::vector<double> map(9);
    for (std::size_t i = 0; i < map.size(); ++i) {
        map[i] = static_cast<double>(i) * 0.1;
    }
    const auto cells = flood_fill_nfc(map, 3, 3, {1, 1}, 0.0);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0] == Coord{1, 1});
}

TEST_CASE("flood_fill_nfc recovers a value cluster") {
    // left 3 columns at 0.1, right 2 columns at 0.9
    std::vector<double> map(25);
    for (int y = 0; y < 5; ++y) {
        for (int x = 0; x < 5; ++x) {
            map[static_cast<std::size_t>(y) * 5 + x] = x < 3 ? 0.1 : 0.9;
        }
    }
    const auto cells = flood_fill_nfc(map, 5, 5, {1, 2}, 0.2);
    CHECK(cells.size() == 15);
    for (const Coord& c : cells) {
        CHECK(c.x < 3);
    }
}

TEST_CASE("group_by_nfc groups the full window of a constant field") {
    const RasterGray detail(32, 32, 0.7);
    ProposalParams p;
    const RippleState state = grow_ripple(detail, {16, 16}, p);
    const auto group = group_by_nfc(detail, state, p.e_max);
    const int n = 2 * state.radius + 1;
    // everything but the DC cell joins the group, and the bbox spans
    // the whole window
    CHECK(static_cast<int>(group.size()) == n * n - 1);
}

TEST_CASE("propose_regions on a blank image is empty") {
    CHECK(propose_regions(RasterGray(64, 64, 0.0)).empty());
}

TEST_CASE("propose_regions finds planted objects") {
    const auto scene = testsupport::make_proposal_scene(123);
    const auto regions = propose_regions(scene.image);
    REQUIRE(!regions.empty());
    int covered = 0;
    for (const auto& truth : scene.truth) {
        for (const auto& r : regions) {
            if (testsupport::iou({r.x, r.y, r.w, r.h}, truth) >= 0.5) {
                ++covered;
                break;
            }
        }
    }
    CHECK(covered >= 4); // at least 4 of the 5 planted objects

    // invariants: bounds, area, entropy sign
    for (const auto& r : regions) {
        CHECK(r.x >= 0);
        CHECK(r.y >= 0);
        CHECK(r.x + r.w <= scene.image.width);
        CHECK(r.y + r.h <= scene.image.height);
        CHECK(static_cast<long long>(r.w) * r.h >= ProposalParams{}.min_region_px);
        CHECK(r.entropy <= 0.0);
    }
}

TEST_CASE("propose_regions with db2 keeps its invariants") {
    const auto scene = testsupport::make_proposal_scene(55);
    ProposalParams p;
    p.wavelet = Wavelet::Db2;
    p.max_radius = 12; // keep the run quick; db2 fields rarely plateau
    const auto regions = propose_regions(scene.image, p);
    for (const auto& r : regions) {
        CHECK(r.x >= 0);
        CHECK(r.y >= 0);
        CHECK(r.x + r.w <= scene.image.width);
        CHECK(r.y + r.h <= scene.image.height);
        CHECK(r.entropy <= 0.0);
        CHECK(static_cast<long long>(r.w) * r.h >= p.min_region_px);
    }
    const auto again = propose_regions(scene.image, p);
    CHECK(regions.size() == again.size());
}

TEST_CASE("propose_regions is deterministic") {
    const auto scene = testsupport::make_proposal_scene(321);
    const auto a = propose_regions(scene.image);
    const auto b = propose_regions(scene.image);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].x == b[i].x);
        CHECK(a[i].y == b[i].y);
        CHECK(a[i].w == b[i].w);
        CHECK(a[i].h == b[i].h);
        CHECK(a[i].entropy == b[i].entropy);
        CHECK(a[i].subband == b[i].subband);
    }
}

} // TEST_SUITE
