#include "cvvdp/report.hpp"

#include <fstream>

#include "cvvdp/error.hpp"
#include "cvvdp/pyramid.hpp"

namespace cvvdp::report {

namespace {

const char* kind_label(pyramid::BandKind k) {
    switch (k) {
        case pyramid::BandKind::high_pass: return "high_pass";
        case pyramid::BandKind::band_pass: return "band_pass";
        case pyramid::BandKind::base: return "base";
    }
    return "";
}

std::string hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) s[i] = digits[h & 15];
    return s;
}

}  // namespace

nlohmann::json make_report(const MetricResult& r, const Metric& m) {
    nlohmann::json j;
    j["jod"] = r.score.jod;
    j["d_pooled"] = r.score.d_pooled;
    j["params_hash"] = m.params().hash_hex();
    j["csf_params_hash"] = hex(m.csf_params().hash());
    j["variant"] = "enc=" + to_string(m.params().encoding) + ",mask=" + to_string(m.params().masking);
    j["display"] = m.display().name;
    j["ppd"] = r.ppd;
    j["fps"] = r.fps;
    j["width"] = r.width;
    j["height"] = r.height;
    j["frames"] = r.frames;
    j["image_mode"] = r.image_mode;
    j["clamped_test"] = r.clamped_test;
    j["clamped_ref"] = r.clamped_ref;

    const auto& f = r.features;
    nlohmann::json bands = nlohmann::json::array();
    for (int b = 0; b < f.bands; ++b)
        bands.push_back({{"index", b},
                         {"cpd", f.band_frequencies[b]},
                         {"kind", kind_label(pyramid::band_kind(b, f.bands))}});
    j["bands"] = bands;
    nlohmann::json channels = nlohmann::json::array();
    for (int c = 0; c < kNumChannels; ++c)
        if (f.active[c]) channels.push_back(kChannelLabels[c]);
    j["channels"] = channels;
    // features[frame][channel][band], channels as listed above.
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& fr : f.frames) {
        nlohmann::json per = nlohmann::json::array();
        for (int c = 0; c < kNumChannels; ++c)
            if (f.active[c]) per.push_back(fr[c]);
        frames.push_back(per);
    }
    j["features"] = frames;
    return j;
}

pooling::PooledFeatures features_from_report(const nlohmann::json& j) {
    try {
        pooling::PooledFeatures f;
        for (const auto& b : j.at("bands")) f.band_frequencies.push_back(b.at("cpd").get<double>());
        f.bands = static_cast<int>(f.band_frequencies.size());
        std::vector<int> order;
        f.active = {false, false, false, false};
        for (const auto& name : j.at("channels")) {
            int found = -1;
            for (int c = 0; c < kNumChannels; ++c)
                if (name.get<std::string>() == kChannelLabels[c]) found = c;
            if (found < 0) throw FormatError("unknown channel in report: " + name.get<std::string>());
            f.active[found] = true;
            order.push_back(found);
        }
        for (const auto& fr : j.at("features")) {
            pooling::FrameFeatures ff;
            if (fr.size() != order.size()) throw FormatError("report features do not match the channel list");
            for (std::size_t k = 0; k < order.size(); ++k) {
                ff[order[k]] = fr[k].get<std::vector<double>>();
                if (static_cast<int>(ff[order[k]].size()) != f.bands) throw FormatError("report band count mismatch");
            }
            f.frames.push_back(std::move(ff));
        }
        return f;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("malformed report: ") + e.what());
    }
}

void write_report(const std::string& path, const nlohmann::json& report) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write report " + path);
    out << report.dump(2) << '\n';
    if (!out) throw FormatError("write failed for " + path);
}

nlohmann::json read_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open report " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("malformed report " + path + ": " + e.what());
    }
}

}  // namespace cvvdp::report
