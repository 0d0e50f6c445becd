#include <doctest.h>

#include <cmath>
#include <random>

#include "cvvdp/error.hpp"
#include "cvvdp/pooling.hpp"

using namespace cvvdp;
using namespace cvvdp::pooling;

namespace {

PooledFeatures make(int frames, int bands, bool image, std::mt19937* rng = nullptr) {
    PooledFeatures f;
    f.bands = bands;
    f.band_frequencies.assign(bands, 1.0);
    if (image) f.active[index(VisualChannel::ach_trans)] = false;
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int i = 0; i < frames; ++i) {
        FrameFeatures ff;
        for (auto& c : ff) c.assign(bands, rng ? u(*rng) : 0.0);
        f.frames.push_back(ff);
    }
    return f;
}

}  // namespace

TEST_CASE("JOD regression") {
    const MetricParams p;
    CHECK(jod_regress(0.0, p).jod == 10.0);
    CHECK(std::abs(jod_regress(1.0, p).jod - 9.95604) < 1e-9);
    double prev = 10.0;
    for (double d = 0.1; d < 1e4; d *= 2.0) {
        const double j = jod_regress(d, p).jod;
        CHECK(j < prev);
        prev = j;
    }
    CHECK_THROWS_AS(jod_regress(-1.0, p), NumericalError);
    CHECK_THROWS_AS(jod_regress(std::nan(""), p), NumericalError);
}

TEST_CASE("band feature") {
    const Plane D(7, 9, 2.5f);
    CHECK(band_feature(D, 2.0) == doctest::Approx(2.5));
    CHECK(band_feature(std::vector<double>{3.0, 4.0}, 2.0) == doctest::Approx(std::sqrt(12.5)));
    // Permutation invariance.
    CHECK(band_feature(std::vector<double>{4.0, 1.0, 3.0}, 2.0) == band_feature(std::vector<double>{1.0, 3.0, 4.0}, 2.0));
}

TEST_CASE("closed forms for uniform single-band features") {
    const MetricParams p;
    for (int c = 0; c < kNumChannels; ++c) {
        auto f = make(1, 4, false);
        f.frames[0][c][2] = 1.7;
        CHECK(pool_video(f, p) == doctest::Approx(p.w[c] * 1.7));
        if (c != index(VisualChannel::ach_trans)) {
            auto g = make(1, 4, true);
            g.frames[0][c][2] = 1.7;
            CHECK(pool_image(g, p) == doctest::Approx(p.k_i * p.w[c] * 1.7));
        }
    }
    CHECK(pool_video(make(3, 4, false), p) == 0.0);
    CHECK(pool_image(make(1, 4, true), p) == 0.0);
}

TEST_CASE("identical frames pool like one frame") {
    const MetricParams p;
    std::mt19937 rng(1);
    const auto one = make(1, 5, false, &rng);
    auto many = one;
    for (int i = 1; i < 12; ++i) many.frames.push_back(one.frames[0]);
    CHECK(pool_video(many, p) == doctest::Approx(pool_video(one, p)).epsilon(1e-12));
}

TEST_CASE("homogeneity, permutation and monotonicity") {
    const MetricParams p;
    std::mt19937 rng(2);
    const auto f = make(6, 5, false, &rng);
    auto scaled = f;
    for (auto& fr : scaled.frames)
        for (auto& c : fr)
            for (auto& v : c) v *= 3.0;
    CHECK(pool_video(scaled, p) == doctest::Approx(3.0 * pool_video(f, p)).epsilon(1e-12));
    auto perm = f;
    std::reverse(perm.frames.begin(), perm.frames.end());
    CHECK(pool_video(perm, p) == doctest::Approx(pool_video(f, p)).epsilon(1e-12));
    auto bigger = f;
    bigger.frames[2][1][3] += 0.5;
    CHECK(pool_video(bigger, p) > pool_video(f, p));
}

TEST_CASE("frame pooler and image pooling preconditions") {
    const MetricParams p;
    FramePooler fp(p);
    CHECK(fp.pooled() == 0.0);
    fp.add(3.0);
    fp.add(4.0);
    CHECK(fp.frames() == 2);
    CHECK(fp.pooled() == doctest::Approx(std::sqrt(12.5)));
    CHECK_THROWS_AS(pool_image(make(2, 3, true), p), Error);
    CHECK_THROWS_AS(pool_image(make(1, 3, false), p), Error);
}
