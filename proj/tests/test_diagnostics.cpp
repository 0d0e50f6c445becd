#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "cvvdp/content.hpp"
#include "cvvdp/diagnostics.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/masking.hpp"

using namespace cvvdp;
using namespace cvvdp::diag;
namespace fs = std::filesystem;

namespace {

const Metric& metric() {
    static const Metric m(display::find_display("sdr_office"));
    return m;
}

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("zero-contrast stimulus is a uniform field at the mean luminance") {
    Stimulus s;
    s.contrast = 0.0;
    const Video v = render_stimulus(s, metric().display(), metric().ppd());
    REQUIRE(v.size() == 1);
    const Frame dkl = metric().to_dkl(v[0]);
    const Vec3 bg = stimulus_background(s, metric().display());
    for (int c = 0; c < 3; ++c)
        for (float x : v[0][c].data) CHECK(x == v[0][c].data[0]);
    CHECK(dkl[0].data[0] == doctest::Approx(bg[0]).epsilon(1e-4));
}

TEST_CASE("achromatic grating stays achromatic after re-decoding") {
    Stimulus s;
    s.contrast = 0.3;
    s.rho = 1.0;
    const Video v = render_stimulus(s, metric().display(), metric().ppd());
    const Frame dkl = metric().to_dkl(v[0]);
    const Vec3 bg = stimulus_background(s, metric().display());
    double ach = 0.0, rg = 0.0, yv = 0.0;
    for (std::size_t i = 0; i < dkl[0].size(); ++i) {
        ach = std::max(ach, std::abs(dkl[0].data[i] - bg[0]));
        rg = std::max(rg, std::abs(dkl[1].data[i] - bg[1]));
        yv = std::max(yv, std::abs(dkl[2].data[i] - bg[2]));
    }
    CHECK(ach == doctest::Approx(0.3 * bg[0]).epsilon(0.01));
    CHECK(rg < 0.006 * ach);
    CHECK(yv < 0.006 * ach);
}

TEST_CASE("grating period is ppd / rho") {
    Stimulus s;
    s.rho = 3.0;
    s.size_deg = 6.0;
    const double ppd = 40.0;
    const Video v = render_stimulus(s, metric().display(), ppd);
    const Plane& g = v[0][1];
    CHECK(g.width == static_cast<int>(std::round(6.0 * ppd)));
    const float mid = 0.5f * (*std::max_element(g.data.begin(), g.data.end()) + *std::min_element(g.data.begin(), g.data.end()));
    std::vector<double> ups;
    const int y = g.height / 2;
    for (int x = 1; x < g.width; ++x) {
        const float a = g.at(x - 1, y) - mid, b = g.at(x, y) - mid;
        if (a < 0.0f && b >= 0.0f) ups.push_back(x - 1 + a / (a - b));
    }
    REQUIRE(ups.size() >= 3);
    const double period = (ups.back() - ups.front()) / (ups.size() - 1);
    CHECK(period == doctest::Approx(ppd / 3.0).epsilon(0.01));
}

TEST_CASE("gamut limits") {
    Stimulus s;
    s.direction = kYvDirection;
    const double cmax = max_contrast(s, metric().display());
    CHECK(cmax > 0.0);
    s.contrast = 0.99 * cmax;
    CHECK_NOTHROW(render_stimulus(s, metric().display(), metric().ppd()));
    s.contrast = 1.05 * cmax;
    try {
        render_stimulus(s, metric().display(), metric().ppd());
        FAIL("expected an out-of-gamut error");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("max") != std::string::npos);
    }
    Stimulus bad;
    bad.size_deg = -1.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("flickering stimulus frames") {
    Stimulus s;
    s.omega = 5.0;
    s.duration_s = 1.0;
    s.fps = 30.0;
    const Video v = render_stimulus(s, metric().display(), metric().ppd());
    CHECK(v.size() == 30);
    // cos(2 pi 5 t) is -1 at t = 0.1 s.
    const float c0 = v[0][1].at(3, 3), c3 = v[3][1].at(3, 3), mid = v[0][1].at(0, 0);
    (void)mid;
    CHECK(std::abs(c0 - c3) > 0.0f);
}

TEST_CASE("self-masking curves") {
    const MetricParams p;
    const double S = 100.0;
    const double thr = 1.0 / (p.s_corr * p.s_ch[0] * S);
    const auto mm = self_masking_curve(VisualChannel::ach_sust, S, {thr}, p);
    CHECK(mm[0].y == doctest::Approx(masking::soft_clamp(1.0, p.k_c)).epsilon(1e-9));
    const auto xs = log_space(1e-4, 1.0, 41);
    CHECK(xs.front() == doctest::Approx(1e-4));
    CHECK(xs.back() == doctest::Approx(1.0));
    MetricParams add = p;
    add.encoding = ContrastEncoding::additive;
    const auto ca = self_masking_curve(VisualChannel::ach_sust, S, xs, add);
    const auto cm = self_masking_curve(VisualChannel::ach_sust, S, xs, p);
    const double clip = 1.0 / (p.s_corr * S) - 1.0 / (add.additive_gain * add.additive_m[0]);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (xs[i] < clip) CHECK(ca[i].y == 0.0);
        if (xs[i] > clip * 1.0001) CHECK(ca[i].y > 0.0);
        if (xs[i] < 0.5 * thr) {
            CHECK(cm[i].y > 0.0);
            CHECK(cm[i].y < 1.0);
        }
        if (i > 0) CHECK(cm[i].y >= cm[i - 1].y);
    }
    // Low sensitivity: most sub-threshold contrast is ignored.
    const double S_low = 5.0;
    const double clip_low = 1.0 / (p.s_corr * S_low) - 1.0 / add.additive_gain;
    CHECK(clip_low > 0.9 / (p.s_corr * S_low));
    const auto low = self_masking_curve(VisualChannel::ach_sust, S_low, {0.5 * clip_low, 0.99 * clip_low}, add);
    CHECK(low[0].y == 0.0);
    CHECK(low[1].y == 0.0);
}

TEST_CASE("masking curves") {
    const MetricParams p;
    const double S = 100.0;
    const double thr = 1.0 / (p.s_corr * p.s_ch[0] * S);
    const auto masks = log_space(1e-4, 1.0, 33);
    std::vector<double> with_zero{0.0};
    with_zero.insert(with_zero.end(), masks.begin(), masks.end());
    const auto mutual = masking_curve(VisualChannel::ach_sust, S, with_zero, p);
    // Zero mask: D = x^p before the soft clamp, so the clamped D reaches 1 at
    // x = (k_c / (k_c - 1))^(1/p) threshold units.
    CHECK(mutual[0].y == doctest::Approx(thr * std::pow(p.k_c / (p.k_c - 1.0), 1.0 / p.p)).epsilon(1e-6));
    for (std::size_t i = 1; i < mutual.size(); ++i) CHECK(mutual[i].y >= mutual[i - 1].y * (1 - 1e-9));
    for (auto enc : {ContrastEncoding::multiplicative, ContrastEncoding::additive}) {
        MetricParams q = p;
        q.encoding = enc;
        q.masking = MaskingModel::transducer;
        const auto t = masking_curve(VisualChannel::ach_sust, S, with_zero, q);
        double lo = 1e9;
        for (std::size_t i = 1; i < t.size(); ++i) lo = std::min(lo, t[i].y);
        CHECK(lo < t[0].y);
    }
}

TEST_CASE("variants") {
    const auto v = all_variants(MetricParams{});
    CHECK(v.size() == 6);
    std::set<std::string> names;
    for (const auto& p : v) names.insert(variant_name(p));
    CHECK(names.size() == 6);
    CHECK(names.count("enc=mult,mask=mutual") == 1);
}

TEST_CASE("matching") {
    MatchingConfig cfg;
    cfg.contrasts = {{0.0, 0.0, 0.0}};
    cfg.levels = {0.0};
    const auto zero = matching_curve(metric(), cfg);
    for (const auto& r : zero.rows) CHECK(r.d_pooled == 0.0);

    const auto res = matching_curve(metric(), MatchingConfig::load(CVVDP_CONFIG_DIR "/matching.json"));
    REQUIRE(res.rows.size() == 9);
    for (double r : res.ratios) CHECK(r <= 1.35);
    for (auto ch : {VisualChannel::ach_sust, VisualChannel::rg, VisualChannel::yv}) {
        double prev_c = 0.0, prev_d = 0.0;
        for (const auto& r : res.rows)
            if (r.channel == ch) {
                CHECK(r.contrast > prev_c);
                CHECK(r.d_pooled > prev_d);
                prev_c = r.contrast;
                prev_d = r.d_pooled;
            }
    }
    const double rho = res.rho, L = 30.0;
    CHECK(matched_contrast(metric(), VisualChannel::rg, 2.0, rho, L) ==
          doctest::Approx(2.0 * matched_contrast(metric(), VisualChannel::rg, 1.0, rho, L)));
}

TEST_CASE("chroma subsampling curves") {
    std::vector<Frame> images;
    for (auto k : {content::ImageKind::landscape, content::ImageKind::shapes})
        images.push_back(content::synth_image(k, 192, 128, 2));
    const std::vector<distort::ChromaSpace> spaces{distort::ChromaSpace::rgb, distort::ChromaSpace::yxy,
                                                   distort::ChromaSpace::ycbcr};
    const auto rows = chroma_ss_curves(metric(), images, spaces, {1, 2, 4, 8});
    CHECK(rows.size() == 2 * 3 * 4);
    auto find = [&](int img, distort::ChromaSpace s, int f) {
        for (const auto& r : rows)
            if (r.image == img && r.space == s && r.factor == f) return r.jod;
        return -1.0;
    };
    for (int i = 0; i < 2; ++i)
        for (auto s : spaces) {
            CHECK(find(i, s, 1) == 10.0);
            for (int f : {2, 4, 8}) CHECK(find(i, s, f) <= find(i, s, f / 2));
        }
    for (int i = 0; i < 2; ++i)
        for (int f : {4, 8}) {
            CHECK(find(i, distort::ChromaSpace::yxy, f) >= find(i, distort::ChromaSpace::rgb, f));
            CHECK(find(i, distort::ChromaSpace::ycbcr, f) >= find(i, distort::ChromaSpace::rgb, f));
        }
}

TEST_CASE("suite outputs are deterministic") {
    const fs::path dir = fs::temp_directory_path() / "cvvdp_test_diag";
    fs::remove_all(dir);
    const nlohmann::json opt{{"points", 9}};
    for (const char* suite : {"self_masking", "masking"}) {
        const std::string a = run_suite(suite, metric(), (dir / "a").string(), opt);
        const std::string b = run_suite(suite, metric(), (dir / "b").string(), opt);
        CHECK(slurp(a) == slurp(b));
        CHECK(fs::exists(dir / "a" / (std::string(suite) + ".svg")));
    }
    std::ifstream in(dir / "a" / "masking.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "variant,mask,threshold");
    CHECK_THROWS(run_suite("nonsense", metric(), (dir / "c").string()));
    fs::remove_all(dir);
}
