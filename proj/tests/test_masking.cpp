#include <doctest.h>

#include <cmath>
#include <random>

#include "cvvdp/masking.hpp"

using namespace cvvdp;
using namespace cvvdp::masking;

namespace {

BandPlanes uniform_planes(int w, int h, std::array<float, 4> v) {
    BandPlanes b;
    for (int c = 0; c < kNumChannels; ++c) b[c] = Plane(w, h, v[c]);
    return b;
}

}  // namespace

TEST_CASE("multiplicative encoding") {
    const MetricParams p;
    CHECK(encode_mult(0.0, 100.0, VisualChannel::ach_sust, p) == 0.0);
    CHECK(encode_mult(0.01, 100.0, VisualChannel::ach_sust, p) == doctest::Approx(0.9683).epsilon(1e-12));
    for (auto c : {VisualChannel::ach_sust, VisualChannel::ach_trans, VisualChannel::rg, VisualChannel::yv}) {
        const double S = 37.0;
        const double thr = 1.0 / (p.s_corr * p.s_ch[index(c)] * S);
        CHECK(encode_mult(thr, S, c, p) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(encode_mult(-thr, S, c, p) == doctest::Approx(-1.0).epsilon(1e-12));
    }
}

TEST_CASE("additive encoding") {
    MetricParams p;
    p.encoding = ContrastEncoding::additive;
    const double S = 50.0, thr = 1.0 / (p.s_corr * S);
    const auto c = VisualChannel::rg;
    CHECK(encode_add(thr, S, c, p) == doctest::Approx(1.0));
    CHECK(encode_add(-thr, S, c, p) == doctest::Approx(-1.0));
    CHECK(encode_add(0.0, S, c, p) == 0.0);
    const double below = thr - 1.5 / (p.additive_gain * p.additive_m[index(c)]);
    CHECK(encode_add(below, S, c, p) == 0.0);
    CHECK(encode(thr, S, c, p) == doctest::Approx(1.0));
}

TEST_CASE("soft clamp") {
    CHECK(soft_clamp(0.0, 366.6) == 0.0);
    CHECK(std::abs(soft_clamp(366.6, 366.6) - 183.3) < 1e-9);
    double prev = 0.0;
    for (double d = 0.01; d < 1e7; d *= 1.5) {
        const double v = soft_clamp(d, 366.6);
        CHECK(v > prev);
        CHECK(v <= d);
        CHECK(v < 366.6);
        prev = v;
    }
    CHECK(soft_clamp(1e12, 366.6) == doctest::Approx(366.6).epsilon(1e-6));
}

TEST_CASE("base band difference") {
    const MetricParams p;
    CHECK(baseband_difference(3.0, 3.0, 10.0, VisualChannel::rg, p) == 0.0);
    CHECK(baseband_difference(1.0, 0.0, 1.0, VisualChannel::ach_sust, p) == doctest::Approx(0.003633));
    const double a = baseband_difference(5.0, 4.0, 7.0, VisualChannel::yv, p);
    CHECK(baseband_difference(6.0, 4.0, 7.0, VisualChannel::yv, p) == doctest::Approx(2.0 * a));
}

TEST_CASE("mutual masking") {
    const MetricParams p;
    const auto c = VisualChannel::ach_sust;
    CHECK(mutual_difference(0.7, 0.7, c, p) == 0.0);
    CHECK(mutual_difference(1.0, 0.0, c, p) == 1.0);
    CHECK(mutual_difference(0.3, 2.0, c, p) == mutual_difference(2.0, 0.3, c, p));
    // Fixed difference, growing mask over four decades.
    double prev = mutual_difference(0.5, 0.0, c, p);
    for (double m : {0.01, 0.1, 1.0, 10.0, 100.0}) {
        const double d = mutual_difference(m + 0.5, m, c, p);
        CHECK(d < prev);
        prev = d;
    }
    prev = 1e300;
    for (double m : {0.0, 1.0, 10.0, 100.0}) {
        const double d = mutual_difference(0.5, 0.0, c, p, m);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("transducer and similarity variants") {
    const MetricParams p;
    const auto c = VisualChannel::rg;
    CHECK(transducer(0.0, c, p, 0.0) == 0.0);
    CHECK(transducer_difference(0.0, 0.0, c, p) == 0.0);
    CHECK(transducer_difference(1.0, 0.0, c, p) == doctest::Approx(1.0));
    CHECK(similarity_difference(1.0, 0.0, c, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(similarity_difference(2.5, 2.5, c, p) == doctest::Approx(0.0).scale(1e-9));
    CHECK(pointwise_difference(1.0, 0.0, c, p) == doctest::Approx(1.0));
}

TEST_CASE("band difference on planes") {
    const MetricParams p;
    const int w = 24, h = 20;
    const auto zero = uniform_planes(w, h, {0, 0, 0, 0});
    const auto t = uniform_planes(w, h, {1, 1, 1, 1});
    auto D = band_difference(t, zero, p);
    for (int c = 0; c < kNumChannels; ++c)
        for (float v : D[c].data) CHECK(v == doctest::Approx(1.0).epsilon(1e-4));
    D = band_difference(t, t, p);
    for (int c = 0; c < kNumChannels; ++c)
        for (float v : D[c].data) CHECK(v == 0.0f);

    // Symmetry and non-negativity on random content.
    std::mt19937 rng(9);
    std::normal_distribution<float> g(0.0f, 3.0f);
    BandPlanes a = zero, b = zero;
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < a[c].size(); ++i) a[c].data[i] = g(rng), b[c].data[i] = g(rng);
    const auto ab = band_difference(a, b, p), ba = band_difference(b, a, p);
    for (int c = 0; c < kNumChannels; ++c)
        for (std::size_t i = 0; i < ab[c].size(); ++i) {
            CHECK(ab[c].data[i] >= 0.0f);
            CHECK(ab[c].data[i] == doctest::Approx(ba[c].data[i]).epsilon(1e-5));
        }

    // Zeroed chromatic planes: chromatic D is 0, achromatic D unchanged.
    BandPlanes a2 = a, b2 = b;
    for (int c : {2, 3}) a2[c].fill(0.0f), b2[c].fill(0.0f);
    const auto d2 = band_difference(a2, b2, p);
    for (int c : {2, 3})
        for (float v : d2[c].data) CHECK(v == 0.0f);
    for (int c : {0, 1})
        for (std::size_t i = 0; i < ab[c].size(); ++i) CHECK(d2[c].data[i] == ab[c].data[i]);

    // Empty channels are skipped.
    BandPlanes a3 = a, b3 = b;
    a3[1] = Plane();
    b3[1] = Plane();
    const auto d3 = band_difference(a3, b3, p);
    CHECK(d3[1].empty());
    CHECK(d3[0].data == ab[0].data);
}

TEST_CASE("plane encoding, blur and clamp") {
    const MetricParams p;
    Plane C(5, 5, 0.01f);
    const Plane S(5, 5, 100.0f);
    encode_plane(C, S, VisualChannel::ach_sust, p);
    for (float v : C.data) CHECK(v == doctest::Approx(0.9683).epsilon(1e-4));
    Plane u(30, 20, 3.0f);
    gaussian_blur(u, 3.0);
    for (float v : u.data) CHECK(v == doctest::Approx(3.0).epsilon(1e-5));
    const auto k = gaussian_kernel(3.0);
    CHECK(k.size() == 19);
    double s = 0;
    for (float v : k) s += v;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-6));
    Plane D(2, 1);
    D.data = {366.6f, 0.0f};
    soft_clamp_plane(D, 366.6);
    CHECK(D.data[0] == doctest::Approx(183.3).epsilon(1e-6));
    CHECK(D.data[1] == 0.0f);
}
