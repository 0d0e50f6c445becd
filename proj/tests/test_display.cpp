#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvvdp/display.hpp"
#include "cvvdp/error.hpp"

using namespace cvvdp;
using namespace cvvdp::display;

namespace {

// Independent oracles.
double srgb_oracle(double v) { return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4); }

double pq_oracle(double v) {
    const double m1 = 2610.0 / 16384, m2 = 2523.0 / 4096 * 128, c1 = 3424.0 / 4096, c2 = 2413.0 / 4096 * 32,
                 c3 = 2392.0 / 4096 * 32;
    const double p = std::pow(v, 1.0 / m2);
    return 10000.0 * std::pow(std::max(p - c1, 0.0) / (c2 - c3 * p), 1.0 / m1);
}

// 1 / (angular size of one pixel in degrees).
double pixel_angle_ppd(double width_m, int px, double dist) {
    const double pitch = width_m / px;
    return 1.0 / (2.0 * std::atan(pitch / (2.0 * dist)) * 180.0 / std::numbers::pi);
}

DisplaySpec spec_1m(double dist) {
    DisplaySpec s;
    s.width_m = 1.0;
    s.resolution_w = 1000;
    s.resolution_h = 500;
    s.viewing_distance_m = dist;
    return s;
}

}  // namespace

TEST_CASE("ppd examples") {
    CHECK(compute_ppd(spec_1m(1.0)) == doctest::Approx(pixel_angle_ppd(1.0, 1000, 1.0)).epsilon(1e-12));
    CHECK(compute_ppd(spec_1m(1.0)) == doctest::Approx(17.4533).epsilon(1e-5));
    CHECK(compute_ppd(spec_1m(2.0)) == doctest::Approx(34.9066).epsilon(1e-5));
}

TEST_CASE("ppd grows with distance") {
    double prev = 0.0;
    for (double d = 0.01; d < 5.0; d *= 1.3) {
        const double p = compute_ppd(spec_1m(d));
        CHECK(p > prev);
        prev = p;
    }
}

TEST_CASE("ppd matches small-angle approximation for small pixels") {
    for (double d : {0.5, 1.0, 3.0}) {
        const auto s = spec_1m(d);
        const double angle = s.width_m / s.resolution_w / d;
        REQUIRE(angle < 0.01);
        const double small = s.resolution_w * d * std::numbers::pi / (180.0 * s.width_m);
        CHECK(std::abs(compute_ppd(s) / small - 1.0) < 1e-3);
    }
}

TEST_CASE("ppd override") {
    auto s = spec_1m(1.0);
    s.ppd_override = 60.0;
    CHECK(effective_ppd(s) == 60.0);
    CHECK(compute_ppd(s) == doctest::Approx(17.4533).epsilon(1e-5));
}

TEST_CASE("invalid geometry is rejected") {
    auto s = spec_1m(1.0);
    s.viewing_distance_m = 0.0;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    CHECK_THROWS_AS(compute_ppd(s), InvalidSpec);
    s = spec_1m(1.0);
    s.width_m = -1.0;
    CHECK_THROWS_AS(compute_ppd(s), InvalidSpec);
    s = spec_1m(1.0);
    s.L_black = s.L_peak;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s = spec_1m(1.0);
    s.k_refl = 1.5;
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
    s = spec_1m(1.0);
    s.rgb_to_xyz = Mat3{};
    CHECK_THROWS_AS(s.validate(), InvalidSpec);
}

TEST_CASE("reflected luminance") {
    CHECK(reflected_luminance(0.01, 100.0) == doctest::Approx(0.31831).epsilon(1e-5));
    CHECK(reflected_luminance(0.01, 100.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-12));
    CHECK(reflected_luminance(0.01, 0.0) == 0.0);
    CHECK(reflected_luminance(0.0, 250.0) == 0.0);
}

TEST_CASE("transfer functions against oracles") {
    for (int i = 0; i <= 1000; ++i) {
        const double v = i / 1000.0;
        CHECK(eotf_normalized(Eotf::srgb, v) == doctest::Approx(srgb_oracle(v)).epsilon(1e-12));
        CHECK(pq_eotf(v) == doctest::Approx(pq_oracle(v)).epsilon(1e-9));
        CHECK(inverse_eotf_normalized(Eotf::srgb, srgb_oracle(v)) == doctest::Approx(v).epsilon(1e-9));
        // The standard inverse maps 0 cd/m^2 to c1^m2 ~ 7e-7.
        CHECK(std::abs(pq_inverse(pq_oracle(v)) - v) < 1e-6);
        CHECK(eotf_normalized(Eotf::gamma, v, 2.4) == doctest::Approx(std::pow(v, 2.4)));
    }
    CHECK(pq_eotf(1.0) == doctest::Approx(10000.0));
    CHECK(parse_eotf("sRGB") == Eotf::srgb);
    CHECK(parse_eotf("pq") == Eotf::pq);
    CHECK_THROWS_AS(parse_eotf("hlg"), ConfigError);
}

TEST_CASE("channel luminance boundaries") {
    DisplaySpec s;
    s.L_peak = 300.0;
    s.L_black = 0.0003;
    s.E_amb = 0.0;
    CHECK(channel_luminance(s, 0.0) == doctest::Approx(0.0003).epsilon(1e-12));
    CHECK(channel_luminance(s, 1.0) == doctest::Approx(300.0));
    s.eotf = Eotf::pq;
    s.L_peak = 1000.0;
    // PQ is absolute: v=1 means 10000 cd/m^2 before clamping at L_peak.
    CHECK(channel_luminance(s, 1.0) == doctest::Approx(1000.0));
    CHECK(channel_luminance(s, pq_inverse(500.0)) == doctest::Approx(500.0 + 0.0003).epsilon(1e-6));
}

TEST_CASE("forward display is monotone and bounded") {
    for (const char* name : {"sdr_office", "eizo_cg3146", "hdr_pq_4k"}) {
        const DisplaySpec s = find_display(name, CVVDP_CONFIG_DIR "/displays.json");
        const double refl = reflected_luminance(s.k_refl, s.E_amb);
        Frame f(257, 1);
        for (int i = 0; i <= 256; ++i)
            for (int c = 0; c < 3; ++c) f[c].at(i, 0) = static_cast<float>(i / 256.0);
        const Frame lin = linear_rgb(f, s);
        for (int c = 0; c < 3; ++c)
            for (int i = 0; i <= 256; ++i) {
                const double L = lin[c].at(i, 0);
                CHECK(L >= (s.L_black + refl) * (1 - 1e-5));
                CHECK(L <= (s.L_peak + refl) * (1 + 1e-5));
                if (i > 0) CHECK(L >= lin[c].at(i - 1, 0));
            }
        // Achromatic input: Y equals the channel luminance (white has Y = 1).
        const Frame xyz = forward_display(f, s);
        for (int i = 0; i <= 256; i += 32)
            CHECK(xyz[1].at(i, 0) == doctest::Approx(channel_luminance(s, i / 256.0)).epsilon(1e-4));
    }
}

TEST_CASE("linear rgb matches the per-value transfer") {
    const DisplaySpec s = find_display("sdr_office", CVVDP_CONFIG_DIR "/displays.json");
    Frame f(1001, 1);
    for (int i = 0; i <= 1000; ++i) f[0].at(i, 0) = f[1].at(i, 0) = f[2].at(i, 0) = static_cast<float>(i / 1000.0);
    const Frame lin = linear_rgb(f, s);
    for (int i = 0; i <= 1000; ++i)
        CHECK(lin[0].at(i, 0) == doctest::Approx(channel_luminance(s, static_cast<float>(i / 1000.0))).epsilon(1e-5));
}

TEST_CASE("out-of-range inputs are clamped and counted") {
    const DisplaySpec s;
    Frame f(4, 1, 0.5f);
    f[0].at(0, 0) = -0.2f;
    f[1].at(1, 0) = 1.3f;
    ForwardStats st;
    const Frame lin = linear_rgb(f, s, InputEncoding::display_encoded, &st);
    CHECK(st.clamped == 2);
    CHECK(lin[0].at(0, 0) == doctest::Approx(channel_luminance(s, 0.0)));
    CHECK(lin[1].at(1, 0) == doctest::Approx(channel_luminance(s, 1.0)));
}

TEST_CASE("inverse display round trip") {
    const DisplaySpec s = find_display("sdr_office", CVVDP_CONFIG_DIR "/displays.json");
    Frame f(64, 2);
    for (int i = 0; i < 128; ++i)
        for (int c = 0; c < 3; ++c) f[c].data[i] = static_cast<float>(((i * (c + 3)) % 97) / 96.0);
    bool ok = false;
    const Frame back = inverse_display(forward_display(f, s), s, &ok);
    CHECK(ok);
    for (int c = 0; c < 3; ++c)
        for (int i = 0; i < 128; ++i) CHECK(back[c].data[i] == doctest::Approx(f[c].data[i]).epsilon(1e-3));
}

TEST_CASE("primaries") {
    const Mat3 m = named_primaries("bt709");
    const Vec3 w = mul(m, Vec3{1, 1, 1});
    CHECK(w[0] == doctest::Approx(0.9505).epsilon(1e-3));
    CHECK(w[1] == doctest::Approx(1.0));
    CHECK(w[2] == doctest::Approx(1.089).epsilon(1e-3));
    // sRGB red primary row from IEC 61966-2-1.
    CHECK(m[0][0] == doctest::Approx(0.4124).epsilon(1e-3));
    CHECK(m[1][0] == doctest::Approx(0.2126).epsilon(1e-3));
    CHECK_THROWS_AS(named_primaries("xyz"), ConfigError);
}

TEST_CASE("display presets") {
    const auto all = load_displays(CVVDP_CONFIG_DIR "/displays.json");
    REQUIRE(all.count("eizo_cg3146"));
    const auto& e = all.at("eizo_cg3146");
    CHECK(e.L_peak == 300.0);
    CHECK(effective_ppd(e) == doctest::Approx(77.0));
    CHECK(compute_ppd(e) == doctest::Approx(74.6).epsilon(5e-3));
    CHECK(effective_ppd(find_display("sdr_40ppd", CVVDP_CONFIG_DIR "/displays.json")) == doctest::Approx(40.0));
    CHECK(find_display("sdr_office").name == "sdr_office");
    CHECK_THROWS(find_display("no_such_display"));
}
