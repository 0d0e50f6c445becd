#include "cvvdp/visualization.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cvvdp/channels.hpp"
#include "cvvdp/error.hpp"

namespace cvvdp::viz {

namespace {

constexpr float kViridis[17][3] = {
    {0.267004f, 0.004874f, 0.329415f}, {0.282327f, 0.094955f, 0.417331f}, {0.278826f, 0.175490f, 0.483397f},
    {0.258965f, 0.251537f, 0.524736f}, {0.229739f, 0.322361f, 0.545706f}, {0.199430f, 0.387607f, 0.554642f},
    {0.172719f, 0.448791f, 0.557885f}, {0.149039f, 0.508051f, 0.557250f}, {0.127568f, 0.566949f, 0.550556f},
    {0.120638f, 0.625828f, 0.533488f}, {0.157851f, 0.683765f, 0.501686f}, {0.246070f, 0.738910f, 0.452024f},
    {0.369214f, 0.788888f, 0.382914f}, {0.515992f, 0.831158f, 0.294279f}, {0.678489f, 0.863742f, 0.189503f},
    {0.845561f, 0.887322f, 0.099702f}, {0.993248f, 0.906157f, 0.143936f},
};

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path);
    return f;
}

std::string band_label(const Distogram& d, int b) {
    if (b == d.bands() - 1) return "BB";
    std::ostringstream s;
    s.precision(3);
    s << d.band_cpd[b];
    return s.str();
}

std::string hex_color(const std::array<float, 3>& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c[0] * 255)),
                  static_cast<int>(std::lround(c[1] * 255)), static_cast<int>(std::lround(c[2] * 255)));
    return buf;
}

}  // namespace

Colormap parse_colormap(const std::string& name) {
    if (name == "viridis") return Colormap::viridis;
    if (name == "gray" || name == "grey") return Colormap::gray;
    throw ConfigError("unknown colormap '" + name + "' (viridis, gray)");
}

std::array<float, 3> colormap(Colormap map, double t) {
    t = std::clamp(std::isfinite(t) ? t : 1.0, 0.0, 1.0);
    if (map == Colormap::gray) {
        const float v = static_cast<float>(t);
        return {v, v, v};
    }
    const double x = t * 16.0;
    const int i = std::min(static_cast<int>(x), 15);
    const float f = static_cast<float>(x - i);
    std::array<float, 3> c;
    for (int k = 0; k < 3; ++k) c[k] = kViridis[i][k] + f * (kViridis[i + 1][k] - kViridis[i][k]);
    return c;
}

Frame render_heatmap(const Frame& test, const Plane& jod_map, const HeatmapStyle& style) {
    if (test.width() != jod_map.width || test.height() != jod_map.height)
        throw DomainError("heatmap size does not match the frame");
    if (!(style.jod_range > 0.0) || style.opacity < 0.0 || style.opacity > 1.0)
        throw ConfigError("heatmap needs jod_range > 0 and opacity in [0,1]");
    Frame out(test.width(), test.height());
    const float a = static_cast<float>(style.opacity);
    for (std::size_t i = 0; i < jod_map.size(); ++i) {
        const float gray = std::clamp(0.2126f * test[0].data[i] + 0.7152f * test[1].data[i] + 0.0722f * test[2].data[i],
                                      0.0f, 1.0f);
        const auto c = colormap(style.map, (10.0 - jod_map.data[i]) / style.jod_range);
        for (int k = 0; k < 3; ++k) out[k].data[i] = (1.0f - a) * gray + a * c[k];
    }
    return out;
}

Distogram make_distogram(const pooling::PooledFeatures& features) {
    Distogram d;
    d.band_cpd = features.band_frequencies;
    d.frames = features.frame_count();
    for (int c = 0; c < kNumChannels; ++c)
        if (features.active[c]) d.channels.push_back(c);
    d.values.assign(d.channels.size() * d.band_cpd.size() * d.frames, 0.0);
    for (int ci = 0; ci < static_cast<int>(d.channels.size()); ++ci)
        for (int b = 0; b < d.bands(); ++b)
            for (int f = 0; f < d.frames; ++f) d.at(ci, b, f) = features.frames[f][d.channels[ci]][b];
    return d;
}

double distogram_pooled(const Distogram& d, const MetricParams& p, bool image_mode) {
    pooling::PooledFeatures pf;
    pf.bands = d.bands();
    pf.band_frequencies = d.band_cpd;
    pf.active.fill(false);
    for (int c : d.channels) pf.active[c] = true;
    pf.frames.resize(d.frames);
    for (int f = 0; f < d.frames; ++f)
        for (int ci = 0; ci < static_cast<int>(d.channels.size()); ++ci) {
            auto& v = pf.frames[f][d.channels[ci]];
            v.resize(d.bands());
            for (int b = 0; b < d.bands(); ++b) v[b] = d.at(ci, b, f);
        }
    return image_mode ? pooling::pool_image(pf, p) : pooling::pool_video(pf, p);
}

void write_distogram_csv(const Distogram& d, const std::string& path) {
    auto f = open_out(path);
    f << "channel,band_cpd,frame,value\n";
    f.precision(9);
    for (int ci = 0; ci < static_cast<int>(d.channels.size()); ++ci)
        for (int b = 0; b < d.bands(); ++b)
            for (int fr = 0; fr < d.frames; ++fr)
                f << kChannelLabels[d.channels[ci]] << ',' << band_label(d, b) << ',' << fr << ',' << d.at(ci, b, fr)
                  << '\n';
}

std::string distogram_svg(const Distogram& d, Colormap map) {
    const int nb = d.bands(), nc = static_cast<int>(d.channels.size());
    const double cell_h = 18.0;
    const double panel_w = std::clamp(6.0 * d.frames, 60.0, 600.0);
    const double cell_w = panel_w / std::max(1, d.frames);
    const double left = 50.0, top = 30.0, gap = 16.0, legend_w = 70.0;
    const double width = left + nc * (panel_w + gap) + legend_w;
    const double height = top + nb * cell_h + 40.0;
    double vmax = 0.0;
    for (double v : d.values) vmax = std::max(vmax, v);

    std::ostringstream s;
    s.precision(4);
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    for (int ci = 0; ci < nc; ++ci) {
        const double x0 = left + ci * (panel_w + gap);
        s << "<text x=\"" << x0 + panel_w / 2 << "\" y=\"18\" text-anchor=\"middle\">" << kChannelLabels[d.channels[ci]]
          << "</text>\n";
        // Highest frequency at the top, base band at the bottom.
        for (int b = 0; b < nb; ++b) {
            const double y = top + b * cell_h;
            for (int f = 0; f < d.frames; ++f) {
                const double t = vmax > 0.0 ? d.at(ci, b, f) / vmax : 0.0;
                s << "<rect x=\"" << x0 + f * cell_w << "\" y=\"" << y << "\" width=\"" << cell_w + 0.05
                  << "\" height=\"" << cell_h << "\" fill=\"" << hex_color(colormap(map, t)) << "\"/>\n";
            }
        }
    }
    for (int b = 0; b < nb; ++b)
        s << "<text x=\"" << left - 6 << "\" y=\"" << top + (b + 0.7) * cell_h << "\" text-anchor=\"end\">"
          << band_label(d, b) << "</text>\n";
    s << "<text x=\"12\" y=\"" << top + nb * cell_h / 2 << "\" transform=\"rotate(-90 12 " << top + nb * cell_h / 2
      << ")\" text-anchor=\"middle\">cpd</text>\n";
    s << "<text x=\"" << left + (nc * (panel_w + gap)) / 2 << "\" y=\"" << top + nb * cell_h + 28
      << "\" text-anchor=\"middle\">frame</text>\n";
    // Legend.
    const double lx = left + nc * (panel_w + gap) + 10;
    for (int i = 0; i < 32; ++i) {
        const double t = 1.0 - i / 31.0;
        s << "<rect x=\"" << lx << "\" y=\"" << top + i * nb * cell_h / 32 << "\" width=\"14\" height=\""
          << nb * cell_h / 32 + 0.05 << "\" fill=\"" << hex_color(colormap(map, t)) << "\"/>\n";
    }
    s << "<text x=\"" << lx + 18 << "\" y=\"" << top + 9 << "\">" << vmax << "</text>\n";
    s << "<text x=\"" << lx + 18 << "\" y=\"" << top + nb * cell_h << "\">0</text>\n";
    s << "</svg>\n";
    return s.str();
}

void write_distogram_svg(const Distogram& d, const std::string& path, Colormap map) {
    auto f = open_out(path);
    f << distogram_svg(d, map);
}

}  // namespace cvvdp::viz
