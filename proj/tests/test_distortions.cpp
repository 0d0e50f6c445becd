#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "cvvdp/content.hpp"
#include "cvvdp/distortions.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/io.hpp"

using namespace cvvdp;
using namespace cvvdp::distort;
namespace fs = std::filesystem;

namespace {

const display::DisplaySpec& disp() {
    static const display::DisplaySpec d = display::find_display("sdr_office");
    return d;
}

bool same(const Frame& a, const Frame& b) {
    for (int c = 0; c < 3; ++c)
        if (a[c].data != b[c].data) return false;
    return true;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("names and validation") {
    for (auto k : kAllKinds) CHECK(parse_kind(kind_name(k)) == k);
    CHECK_THROWS_AS(parse_kind("sharpen"), ConfigError);
    CHECK_THROWS_AS((DistortionSpec{Kind::blur, 4, 0}.validate()), ConfigError);
    CHECK_THROWS_AS((DistortionSpec{Kind::blur, -1, 0}.validate()), ConfigError);
    CHECK(parse_chroma_space("yxy") == ChromaSpace::yxy);
    CHECK_THROWS_AS(parse_chroma_space("lab"), ConfigError);
}

TEST_CASE("level 0 is the identity and geometry is preserved") {
    const Video v = content::synth_video(content::VideoKind::motion, 48, 32, 4, 1);
    for (auto k : kAllKinds) {
        const Video z = apply(v, {k, 0, 3}, 40.0, disp());
        REQUIRE(z.size() == v.size());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(same(z[i], v[i]));
        for (int level = 1; level <= 3; ++level) {
            const Video d = apply(v, {k, level, 3}, 40.0, disp());
            REQUIRE(d.size() == v.size());
            for (const auto& f : d) {
                CHECK(f.width() == 48);
                CHECK(f.height() == 32);
                for (int c = 0; c < 3; ++c)
                    for (float x : f[c].data) CHECK((x >= 0.0f && x <= 1.0f));
            }
            CHECK_FALSE(same(d[1], v[1]));
        }
    }
}

TEST_CASE("fixed seeds are deterministic") {
    const Video v = content::synth_video(content::VideoKind::pan, 40, 24, 3, 2);
    for (auto k : kAllKinds) {
        const Video a = apply(v, {k, 2, 99}, 40.0, disp()), b = apply(v, {k, 2, 99}, 40.0, disp());
        for (std::size_t i = 0; i < v.size(); ++i) CHECK(same(a[i], b[i]));
    }
    for (auto k : {Kind::dither, Kind::lsnu, Kind::wgnu}) {
        const Video a = apply(v, {k, 2, 1}, 40.0, disp()), b = apply(v, {k, 2, 2}, 40.0, disp());
        CHECK_FALSE(same(a[0], b[0]));
    }
}

TEST_CASE("dither quantizes to the level bit depth") {
    const Frame f = content::synth_image(content::ImageKind::landscape, 64, 48, 3);
    const std::array<int, 3> bits{6, 5, 4};
    std::size_t prev_distinct = 1000;
    for (int level = 1; level <= 3; ++level) {
        const Frame d = apply(f, {Kind::dither, level, 5}, 40.0, disp());
        const double n = (1 << bits[level - 1]) - 1;
        std::set<float> distinct;
        for (int c = 0; c < 3; ++c)
            for (float v : d[c].data) {
                CHECK(std::abs(v * n - std::round(v * n)) < 1e-5);
                distinct.insert(v);
            }
        CHECK(distinct.size() <= prev_distinct);
        prev_distinct = distinct.size();
        // Dithering keeps the local mean.
        double s0 = 0.0, s1 = 0.0;
        for (std::size_t i = 0; i < f[1].size(); ++i) s0 += f[1].data[i], s1 += d[1].data[i];
        CHECK(s1 / f[1].size() == doctest::Approx(s0 / f[1].size()).epsilon(0.02));
    }
}

TEST_CASE("contrast reduction bounds the linear max/min ratio") {
    const Video v = content::synth_video(content::VideoKind::pan, 64, 48, 3, 7);
    const std::array<double, 3> ratio{100.0, 50.0, 30.0};
    for (int level = 1; level <= 3; ++level) {
        const Video d = apply(v, {Kind::contrast, level, 1}, 40.0, disp());
        for (const auto& f : d) {
            double lo = 1e9, hi = 0.0;
            for (int c = 0; c < 3; ++c)
                for (float x : f[c].data) {
                    const double l = display::eotf_normalized(disp().eotf, x, disp().gamma);
                    lo = std::min(lo, l);
                    hi = std::max(hi, l);
                }
            CHECK(hi / lo <= ratio[level - 1] * 1.02);
        }
    }
}

TEST_CASE("fringes shift red and blue and keep green") {
    const int w = 40, h = 30;
    Frame f(w, h);
    // Linear-light planes affine in x and y, so bilinear shifts are exact inside.
    auto lin = [](int c, double x, double y) { return 0.1 + 0.004 * (c + 1) * x + 0.003 * y; };
    for (int c = 0; c < 3; ++c)
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                f[c].at(x, y) = static_cast<float>(display::inverse_eotf_normalized(disp().eotf, lin(c, x, y), disp().gamma));
    const Frame d = apply(f, {Kind::fringes, 2, 0}, 40.0, disp());
    CHECK(d[1].data == f[1].data);
    for (int y = 4; y < h - 4; ++y)
        for (int x = 4; x < w - 4; ++x) {
            const double r = display::eotf_normalized(disp().eotf, d[0].at(x, y), disp().gamma);
            const double b = display::eotf_normalized(disp().eotf, d[2].at(x, y), disp().gamma);
            CHECK(r == doctest::Approx(lin(0, x - 1.0, y - 0.5)).epsilon(1e-4));
            CHECK(b == doctest::Approx(lin(2, x - 0.5, y + 1.0)).epsilon(1e-4));
        }
}

TEST_CASE("level parameters grow in severity") {
    const DistortionConfig c;
    for (int i = 0; i < 2; ++i) {
        CHECK(c.dither_bits[i + 1] < c.dither_bits[i]);
        CHECK(c.lsnu_sigma[i + 1] > c.lsnu_sigma[i]);
        CHECK(c.blur_sigma_px77[i + 1] > c.blur_sigma_px77[i]);
        CHECK(c.contrast_ratio[i + 1] < c.contrast_ratio[i]);
        CHECK(c.wgnu_amplitude[i + 1] > c.wgnu_amplitude[i]);
        CHECK(c.dce_sigma_deg[i + 1] > c.dce_sigma_deg[i]);
        CHECK(c.chroma_factor[i + 1] > c.chroma_factor[i]);
        CHECK(std::hypot(c.fringe_shift[i + 1][0], c.fringe_shift[i + 1][1]) >=
              std::hypot(c.fringe_shift[i][0], c.fringe_shift[i][1]));
    }
    const auto back = DistortionConfig::from_json(c.to_json());
    CHECK(back.to_json() == c.to_json());
    CHECK(DistortionConfig::load(CVVDP_CONFIG_DIR "/distortions.json").to_json() == c.to_json());
}

TEST_CASE("LSNU gains are bounded and fixed across frames") {
    Video v(3, Frame(32, 32, 0.6f));
    const Video d = apply(v, {Kind::lsnu, 3, 4}, 40.0, disp());
    CHECK(same(d[0], d[2]));
    const double base = display::eotf_normalized(disp().eotf, 0.6, disp().gamma);
    for (float x : d[0][0].data) {
        const double g = display::eotf_normalized(disp().eotf, x, disp().gamma) / base;
        CHECK(std::abs(g - 1.0) <= 4.0 * 0.09 + 1e-3);
    }
}

TEST_CASE("blue-noise tile") {
    const auto t = blue_noise_tile(1);
    REQUIRE(t.size() == 64 * 64);
    std::set<float> distinct(t.begin(), t.end());
    CHECK(distinct.size() == t.size());
    for (float v : t) CHECK((v > 0.0f && v < 1.0f));
    CHECK(blue_noise_tile(1) == t);
    CHECK(blue_noise_tile(2) != t);
    // Blue noise: mean spectral power at low frequencies is well below the rest.
    double low = 0.0, high = 0.0;
    int n_low = 0, n_high = 0;
    for (int u = 0; u < 64; ++u)
        for (int v = 0; v < 64; ++v) {
            if (u == 0 && v == 0) continue;
            double re = 0.0, im = 0.0;
            for (int y = 0; y < 64; ++y)
                for (int x = 0; x < 64; ++x) {
                    const double a = -2.0 * 3.14159265358979 * (u * x + v * y) / 64.0;
                    re += (t[y * 64 + x] - 0.5) * std::cos(a);
                    im += (t[y * 64 + x] - 0.5) * std::sin(a);
                }
            const double r = std::hypot(std::min(u, 64 - u), std::min(v, 64 - v));
            if (r < 8.0)
                low += re * re + im * im, ++n_low;
            else
                high += re * re + im * im, ++n_high;
        }
    CHECK(low / n_low < 0.5 * high / n_high);
}

TEST_CASE("seed derivation") {
    const auto a = derive_seed(1, "a.png", Kind::blur, 1);
    CHECK(a == derive_seed(1, "a.png", Kind::blur, 1));
    CHECK(a != derive_seed(1, "a.png", Kind::blur, 2));
    CHECK(a != derive_seed(1, "b.png", Kind::blur, 1));
    CHECK(a != derive_seed(2, "a.png", Kind::blur, 1));
    CHECK(a != derive_seed(1, "a.png", Kind::lsnu, 1));
}

TEST_CASE("corpus generation") {
    const fs::path dir = fs::temp_directory_path() / "cvvdp_test_corpus";
    fs::remove_all(dir);
    fs::create_directories(dir / "in");
    const std::string ref = (dir / "in" / "ref.png").string();
    io::write_png(ref, content::synth_image(content::ImageKind::shapes, 48, 32, 1), 16);
    const auto rows = generate_corpus({ref}, (dir / "out").string(), disp(), 5);
    CHECK(rows.size() == 24);
    std::ifstream m(dir / "out" / "manifest.csv");
    std::string line;
    int n = 0;
    std::getline(m, line);
    while (std::getline(m, line)) ++n;
    CHECK(n == 24);
    // Re-applying a manifest seed gives the same file.
    const auto& row = rows[7];
    const Frame in = io::read_png(ref).frame;
    const Frame again = apply(in, {row.kind, row.level, row.seed}, display::effective_ppd(disp()), disp());
    io::write_png((dir / "again.png").string(), again, 16);
    CHECK(slurp(dir / "again.png") == slurp(dir / "out" / row.file));
    // And a second run gives identical files.
    generate_corpus({ref}, (dir / "out2").string(), disp(), 5);
    for (const auto& r : rows) CHECK(slurp(dir / "out" / r.file) == slurp(dir / "out2" / r.file));
    CHECK(generate_corpus({}, (dir / "empty").string(), disp()).empty());
    CHECK(fs::exists(dir / "empty" / "manifest.csv"));
    fs::remove_all(dir);
}
