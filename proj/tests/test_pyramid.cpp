#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cvvdp/error.hpp"
#include "cvvdp/pyramid.hpp"

using namespace cvvdp;
using namespace cvvdp::pyramid;

namespace {

Plane random_plane(int w, int h, std::mt19937& rng, float lo, float hi) {
    std::uniform_real_distribution<float> u(lo, hi);
    Plane p(w, h);
    for (auto& v : p.data) v = u(rng);
    return p;
}

Plane grating(int w, int h, double ppd, double rho, double mean, double m) {
    Plane p(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            p.at(x, y) = static_cast<float>(mean * (1.0 + m * std::cos(2.0 * std::numbers::pi * rho * x / ppd)));
    return p;
}

}  // namespace

TEST_CASE("perfect reconstruction over random frames and resolutions") {
    std::mt19937 rng(3);
    const std::array<std::array<int, 2>, 3> sizes{{{64, 48}, {127, 93}, {320, 181}}};
    for (const auto& s : sizes)
        for (int i = 0; i < 20; ++i) {
            const Plane in = random_plane(s[0], s[1], rng, 0.0f, 100.0f);
            const auto pyr = decompose(in, band_count(s[0], s[1], 60.0));
            const Plane out = pyr.reconstruct();
            REQUIRE(out.width == in.width);
            REQUIRE(out.height == in.height);
            double err = 0.0;
            for (std::size_t k = 0; k < in.size(); ++k) err = std::max(err, double(std::abs(out.data[k] - in.data[k])));
            CHECK(err < 1e-6 * 100.0);
        }
}

TEST_CASE("uniform frame") {
    const Plane in(100, 70, 42.0f);
    const auto pyr = decompose(in, 5, true);
    for (int b = 0; b < 4; ++b)
        for (float v : pyr.bands[b].data) CHECK(std::abs(v) < 1e-5f);
    for (float v : pyr.bands[4].data) CHECK(v == doctest::Approx(42.0));
    for (const auto& bg : pyr.background)
        for (float v : bg.data) CHECK(v == doctest::Approx(42.0));
}

TEST_CASE("reduce and expand sizes") {
    const Plane in(33, 17, 1.0f);
    const Plane r = reduce(in);
    CHECK(r.width == 17);
    CHECK(r.height == 9);
    const Plane e = expand(r, 33, 17);
    CHECK(e.width == 33);
    CHECK(e.height == 17);
    for (float v : e.data) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("band count and frequencies") {
    const int n = band_count(1920, 1080, 77.0);
    CHECK(n == 8);
    const auto rho = band_frequencies(n, 77.0);
    CHECK(rho[0] == doctest::Approx(38.5));
    for (int b = 2; b < n; ++b) CHECK(rho[b] == doctest::Approx(rho[b - 1] / 2.0));
    CHECK(rho[n - 2] > kMinBandFrequency);
    // The next band-pass level would fall at or below the limit.
    CHECK(rho[n - 2] / 2.0 <= kMinBandFrequency);
    CHECK(band_kind(0, n) == BandKind::high_pass);
    CHECK(band_kind(3, n) == BandKind::band_pass);
    CHECK(band_kind(n - 1, n) == BandKind::base);
    CHECK(band_count(1920, 1080, 77.0) == n);
    // Small frames are capped so the base keeps a few pixels.
    CHECK(band_count(16, 16, 77.0) == 3);
    CHECK_THROWS_AS(band_count(7, 100, 60.0), DomainError);
    CHECK_THROWS_AS(band_count(100, 100, 0.0), DomainError);
}

TEST_CASE("band contrast of a grating at the band peak") {
    const double ppd = 64.0;
    const int w = 512, h = 64;
    const int n = band_count(w, h, ppd);
    const auto rho = band_frequencies(n, ppd);
    for (int b = 1; b < n - 1; ++b) {
        const double m = 0.2;
        const auto pyr = decompose(grating(w, h, ppd, rho[b], 50.0, m), n, true);
        const Plane C = band_contrast(pyr.bands[b], pyr.background[b], band_kind(b, n));
        double peak = 0.0;
        const int margin = C.width / 4;
        for (int x = margin; x < C.width - margin; ++x) peak = std::max(peak, double(std::abs(C.at(x, C.height / 2))));
        if (b >= 2) CHECK(peak == doctest::Approx(m).epsilon(0.15));
    }
}

TEST_CASE("band contrast is luminance invariant and zero for zero bands") {
    std::mt19937 rng(5);
    const Plane in = random_plane(96, 64, rng, 10.0f, 90.0f);
    Plane in2 = in;
    for (auto& v : in2.data) v *= 2.0f;
    const auto a = decompose(in, 4, true), b = decompose(in2, 4, true);
    for (int k = 0; k < 3; ++k) {
        const Plane ca = band_contrast(a.bands[k], a.background[k], band_kind(k, 4));
        const Plane cb = band_contrast(b.bands[k], b.background[k], band_kind(k, 4));
        for (std::size_t i = 0; i < ca.size(); ++i) CHECK(cb.data[i] == doctest::Approx(ca.data[i]).epsilon(1e-4).scale(1e-3));
    }
    const Plane zero(10, 10), bg(10, 10, 5.0f);
    for (float v : band_contrast(zero, bg, BandKind::band_pass).data) CHECK(v == 0.0f);
    // Band-pass bands carry the factor 2; the denominator is clamped.
    const Plane one(4, 4, 1.0f), dark(4, 4, 0.0f);
    CHECK(band_contrast(one, Plane(4, 4, 5.0f), BandKind::band_pass).data[0] == doctest::Approx(0.4));
    CHECK(band_contrast(one, Plane(4, 4, 5.0f), BandKind::high_pass).data[0] == doctest::Approx(0.2));
    CHECK(band_contrast(one, dark, BandKind::high_pass).data[0] == doctest::Approx(1.0 / kMinBackground));
}
