#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cvvdp/content.hpp"
#include "cvvdp/distortions.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/report.hpp"

using namespace cvvdp;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST_CASE("report round trip") {
    const Metric metric(display::find_display("sdr_office"));
    const Video ref = content::synth_video(content::VideoKind::motion, 96, 64, 6, 5);
    const Video test = distort::apply(ref, {distort::Kind::dither, 2, 7}, metric.ppd(), metric.display());
    const MetricResult r = metric.evaluate(test, ref, 30.0);
    const auto j = report::make_report(r, metric);
    CHECK(j.at("jod").get<double>() == r.score.jod);
    CHECK(j.at("frames").get<int>() == 6);
    CHECK(j.at("image_mode").get<bool>() == false);

    const fs::path dir = fs::temp_directory_path() / "cvvdp_test_report";
    fs::create_directories(dir);
    report::write_report((dir / "a.json").string(), j);
    report::write_report((dir / "b.json").string(), report::make_report(metric.evaluate(test, ref, 30.0), metric));
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));

    const auto back = report::read_report((dir / "a.json").string());
    const auto f = report::features_from_report(back);
    REQUIRE(f.frame_count() == r.features.frame_count());
    CHECK(f.bands == r.features.bands);
    CHECK(f.active == r.features.active);
    for (int i = 0; i < f.frame_count(); ++i)
        for (int c = 0; c < kNumChannels; ++c)
            for (int b = 0; b < f.bands; ++b)
                CHECK(f.at(i, static_cast<VisualChannel>(c), b) == r.features.at(i, static_cast<VisualChannel>(c), b));
    // Re-pooling the stored features reproduces the score.
    CHECK(pooling::pool_video(f, metric.params()) == doctest::Approx(r.score.d_pooled).epsilon(1e-12));

    std::ofstream(dir / "bad.json") << "{ not json";
    CHECK_THROWS(report::read_report((dir / "bad.json").string()));
    CHECK_THROWS(report::read_report((dir / "missing.json").string()));
    fs::remove_all(dir);
}

TEST_CASE("image reports") {
    const Metric metric(display::find_display("sdr_office"));
    const Frame ref = content::synth_image(content::ImageKind::texture, 128, 96, 3);
    const Frame test = distort::apply(ref, {distort::Kind::blur, 1, 0}, metric.ppd(), metric.display());
    const MetricResult r = metric.evaluate(test, ref);
    const auto j = report::make_report(r, metric);
    CHECK(j.at("image_mode").get<bool>());
    const auto f = report::features_from_report(j);
    CHECK(f.active[index(VisualChannel::ach_trans)] == false);
    CHECK(pooling::pool_image(f, metric.params()) == doctest::Approx(r.score.d_pooled).epsilon(1e-12));
}
