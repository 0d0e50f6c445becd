#include <doctest.h>

#include <cmath>

#include "cvvdp/content.hpp"
#include "cvvdp/distortions.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/metric.hpp"

using namespace cvvdp;

namespace {

const Metric& metric() {
    static const Metric m(display::find_display("sdr_office"));
    return m;
}

class ThrowingSource : public FrameSource {
public:
    ThrowingSource(int w, int h, int fail_at) : fail_at_(fail_at) {
        info_.width = w;
        info_.height = h;
        info_.fps = 30.0;
    }
    const SourceInfo& info() const override { return info_; }
    bool read(Frame& out) override {
        if (n_ == fail_at_) throw FormatError("truncated frame");
        out = Frame(info_.width, info_.height, 0.5f);
        ++n_;
        return true;
    }

private:
    SourceInfo info_;
    int fail_at_;
    int n_ = 0;
};

}  // namespace

TEST_CASE("identity scores exactly 10") {
    using content::ImageKind;
    for (auto k : {ImageKind::landscape, ImageKind::shapes, ImageKind::texture}) {
        const Frame f = content::synth_image(k, 160, 120, 4);
        const auto r = metric().evaluate(f, f);
        CHECK(r.score.jod == 10.0);
        CHECK(r.score.d_pooled == 0.0);
        CHECK(r.image_mode);
    }
    const Video v = content::synth_video(content::VideoKind::motion, 96, 64, 12, 2);
    const auto r = metric().evaluate(v, v, 30.0);
    CHECK(r.score.jod == 10.0);
    CHECK_FALSE(r.image_mode);
    CHECK(r.frames == 12);
}

TEST_CASE("blur level ordering") {
    const Frame f = content::synth_image(content::ImageKind::landscape, 192, 128, 1);
    double prev = 10.0;
    for (int level = 1; level <= 3; ++level) {
        const Frame d = distort::apply(f, {distort::Kind::blur, level, 7}, metric().ppd(), metric().display());
        const double jod = metric().evaluate(d, f).score.jod;
        CHECK(jod < prev);
        prev = jod;
    }
}

TEST_CASE("image and one-frame video take the same path") {
    const Frame ref = content::synth_image(content::ImageKind::shapes, 128, 96, 3);
    const Frame test = distort::apply(ref, {distort::Kind::lsnu, 2, 5}, metric().ppd(), metric().display());
    const auto a = metric().evaluate(test, ref);
    const auto b = metric().evaluate(Video{test}, Video{ref}, 30.0);
    CHECK(a.image_mode);
    CHECK(b.image_mode);
    CHECK(std::abs(a.score.jod - b.score.jod) < 1e-6);
}

TEST_CASE("argument order matters only through the reference background") {
    const Frame f = content::synth_image(content::ImageKind::texture, 128, 96, 3);
    const auto a = metric().evaluate(f, f), b = metric().evaluate(f, f);
    CHECK(a.score.jod == b.score.jod);
    const Frame d = distort::apply(f, {distort::Kind::contrast, 3, 5}, metric().ppd(), metric().display());
    const double ab = metric().evaluate(d, f).score.jod, ba = metric().evaluate(f, d).score.jod;
    CHECK(ab < 10.0);
    CHECK(ba < 10.0);
}

TEST_CASE("pairing errors") {
    const Frame a(64, 64, 0.5f), b(64, 48, 0.5f);
    CHECK_THROWS_AS(metric().evaluate(a, b), PairingError);
    const Video v1(4, a), v2(5, a);
    CHECK_THROWS_AS(metric().evaluate(v1, v2, 30.0), PairingError);
    MemorySource s1(v1, 30.0), s2(v1, 25.0);
    CHECK_THROWS_AS(metric().evaluate(s1, s2), PairingError);
    const Video empty;
    MemorySource e1(empty, 30.0), e2(empty, 30.0);
    CHECK_THROWS_AS(metric().evaluate(e1, e2), PairingError);
}

TEST_CASE("stage errors carry stage name and frame index") {
    ThrowingSource t(64, 64, 5), r(64, 64, -1);
    try {
        metric().evaluate(t, r);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.stage() == "read test");
        CHECK(e.frame() == 5);
    }
    const Frame tiny(4, 4, 0.5f);
    try {
        metric().evaluate(tiny, tiny);
        FAIL("expected a stage error");
    } catch (const StageError& e) {
        CHECK(e.frame() == 0);
    }
}

TEST_CASE("streaming matches the in-memory video path") {
    const Video ref = content::synth_video(content::VideoKind::pan, 96, 64, 10, 6);
    const Video test = distort::apply(ref, {distort::Kind::dither, 3, 1}, metric().ppd(), metric().display());
    MemorySource st(test, 30.0), sr(ref, 30.0);
    const auto a = metric().evaluate(st, sr);
    const auto b = metric().evaluate(test, ref, 30.0);
    CHECK(a.score.jod == b.score.jod);
    CHECK(a.frames == 10);
    EvalOptions one;
    one.threads = 1;
    CHECK(metric().evaluate(test, ref, 30.0, one).score.jod == doctest::Approx(a.score.jod).epsilon(1e-9));
}

TEST_CASE("out-of-range inputs are clamped and counted") {
    Frame t(32, 32, 0.5f), r(32, 32, 0.5f);
    t[0].data[0] = 1.5f;
    t[1].data[3] = -0.2f;
    const auto res = metric().evaluate(t, r);
    CHECK(res.clamped_test == 2);
    CHECK(res.clamped_ref == 0);
}

TEST_CASE("low frame rates use the sustained channels only") {
    const Video v = content::synth_video(content::VideoKind::pan, 64, 64, 6, 1);
    const Video d = distort::apply(v, {distort::Kind::blur, 2, 1}, metric().ppd(), metric().display());
    const auto r = metric().evaluate(d, v, 8.0);
    CHECK_FALSE(r.features.active[index(VisualChannel::ach_trans)]);
    CHECK(r.score.jod < 10.0);
    CHECK_THROWS_AS(metric().evaluate(v, v, 0.0), ConfigError);
}

TEST_CASE("per-pixel JOD map") {
    const MetricParams p;
    Plane D(3, 1);
    D.data = {0.0f, 1.0f, 10.0f};
    const Plane j = distortion_to_jod(D, p);
    CHECK(j.data[0] == 10.0f);
    CHECK(j.data[1] == doctest::Approx(9.95604).epsilon(1e-6));
    CHECK(j.data[2] < j.data[1]);
}
