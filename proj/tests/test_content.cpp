#include <doctest.h>

#include "cvvdp/content.hpp"
#include "cvvdp/error.hpp"

using namespace cvvdp;

TEST_CASE("synthetic content is deterministic and in range") {
    for (auto k : {content::ImageKind::landscape, content::ImageKind::shapes, content::ImageKind::texture}) {
        const Frame a = content::synth_image(k, 97, 61, 4);
        const Frame b = content::synth_image(k, 97, 61, 4);
        const Frame c = content::synth_image(k, 97, 61, 5);
        CHECK(a.width() == 97);
        CHECK(a.height() == 61);
        bool differs = false;
        for (int ch = 0; ch < 3; ++ch) {
            CHECK(a[ch].data == b[ch].data);
            differs |= a[ch].data != c[ch].data;
            for (float v : a[ch].data) CHECK((v >= 0.0f && v <= 1.0f));
        }
        CHECK(differs);
    }
    const Video v = content::synth_video(content::VideoKind::pan, 64, 40, 5, 1);
    REQUIRE(v.size() == 5);
    CHECK(v[0][0].data != v[4][0].data);
}

TEST_CASE("fractal noise") {
    // Zero mean in expectation over seeds; one frame sees few coarse cells.
    double mean = 0.0, peak = 0.0;
    int n = 0;
    for (std::uint64_t seed = 0; seed < 16; ++seed) {
        const Plane p = content::fractal_noise(256, 256, seed, 1.0, 8);
        for (float x : p.data) {
            mean += x;
            peak = std::max(peak, double(std::abs(x)));
            ++n;
        }
    }
    mean /= n;
    CHECK(peak > 0.1);
    CHECK(peak <= 1.0);
    CHECK(std::abs(mean) < 0.02);
}

TEST_CASE("content names") {
    CHECK(content::parse_image_kind("shapes") == content::ImageKind::shapes);
    CHECK(content::parse_video_kind("motion") == content::VideoKind::motion);
    CHECK_THROWS(content::parse_image_kind("cat"));
    CHECK_THROWS(content::parse_video_kind(""));
}
