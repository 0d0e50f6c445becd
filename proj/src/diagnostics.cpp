#include "cvvdp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <map>
#include <sstream>

#include "cvvdp/color_space.hpp"
#include "cvvdp/content.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/io.hpp"
#include "cvvdp/masking.hpp"
#include "cvvdp/pyramid.hpp"

namespace cvvdp::diag {

StimulusKind parse_stimulus_kind(const std::string& s) {
    if (s == "grating") return StimulusKind::grating;
    if (s == "gabor") return StimulusKind::gabor;
    if (s == "uniform") return StimulusKind::uniform;
    throw ConfigError("unknown stimulus '" + s + "' (grating, gabor, uniform)");
}

void Stimulus::validate() const {
    if (!(rho >= 0.0) || !(omega >= 0.0)) throw ConfigError("stimulus frequencies must be >= 0");
    if (!(contrast >= 0.0)) throw ConfigError("stimulus contrast must be >= 0");
    if (!(mean_luminance > 0.0)) throw ConfigError("stimulus mean luminance must be > 0");
    if (!(size_deg > 0.0)) throw ConfigError("stimulus size must be > 0");
    if (!(duration_s >= 0.0) || (duration_s > 0.0 && !(fps > 0.0))) throw ConfigError("bad stimulus duration/fps");
    const double m = std::max({std::abs(direction[0]), std::abs(direction[1]), std::abs(direction[2])});
    if (!(m > 0.0)) throw ConfigError("stimulus direction must be non-zero");
}

Vec3 stimulus_background(const Stimulus& stim, const display::DisplaySpec& display) {
    const Vec3 white = mul(display.rgb_to_xyz, Vec3{1.0, 1.0, 1.0});
    const double k = stim.mean_luminance / white[1];
    return mul(color::xyz_to_dkl_matrix(), Vec3{white[0] * k, white[1] * k, white[2] * k});
}

namespace {

Vec3 unit_direction(const Vec3& d) {
    const double m = std::max({std::abs(d[0]), std::abs(d[1]), std::abs(d[2])});
    return {d[0] / m, d[1] / m, d[2] / m};
}

// XYZ of background + s * contrast * I_ach * direction.
struct StimulusColour {
    Vec3 bg_xyz;
    Vec3 mod_xyz;  // per unit of s and unit contrast

    StimulusColour(const Stimulus& stim, const display::DisplaySpec& display) {
        const Vec3 bg = stimulus_background(stim, display);
        const Mat3 to_xyz = inverse(color::xyz_to_dkl_matrix());
        bg_xyz = mul(to_xyz, bg);
        const Vec3 dir = unit_direction(stim.direction);
        mod_xyz = mul(to_xyz, Vec3{dir[0] * bg[0], dir[1] * bg[0], dir[2] * bg[0]});
    }

    Vec3 at(double contrast, double s) const {
        return {bg_xyz[0] + contrast * s * mod_xyz[0], bg_xyz[1] + contrast * s * mod_xyz[1],
                bg_xyz[2] + contrast * s * mod_xyz[2]};
    }
};

bool extremes_in_gamut(const StimulusColour& col, double contrast, const display::DisplaySpec& display) {
    Frame xyz(2, 1);
    for (int i = 0; i < 2; ++i) {
        const Vec3 v = col.at(contrast, i == 0 ? -1.0 : 1.0);
        for (int c = 0; c < 3; ++c) xyz[c].data[i] = static_cast<float>(v[c]);
    }
    bool ok = false;
    display::inverse_display(xyz, display, &ok);
    return ok;
}

}  // namespace

double max_contrast(const Stimulus& stim, const display::DisplaySpec& display) {
    stim.validate();
    const StimulusColour col(stim, display);
    if (!extremes_in_gamut(col, 0.0, display))
        throw DomainError("mean luminance " + std::to_string(stim.mean_luminance) + " cd/m^2 is outside the display range");
    double lo = 0.0, hi = 1.0;
    while (extremes_in_gamut(col, hi, display)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e6) return hi;
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (extremes_in_gamut(col, mid, display) ? lo : hi) = mid;
    }
    return lo;
}

Video render_stimulus(const Stimulus& stim, const display::DisplaySpec& display, double ppd) {
    stim.validate();
    if (!(ppd > 0.0)) throw ConfigError("stimulus rendering needs ppd > 0");
    const StimulusColour col(stim, display);
    if (!extremes_in_gamut(col, stim.contrast, display)) {
        std::ostringstream os;
        os << "stimulus contrast " << stim.contrast << " is out of gamut; max attainable contrast is "
           << max_contrast(stim, display);
        throw DomainError(os.str());
    }
    const int n = std::max(8, static_cast<int>(std::lround(stim.size_deg * ppd)));
    const int frames = stim.duration_s > 0.0 ? std::max(1, static_cast<int>(std::lround(stim.duration_s * stim.fps))) : 1;
    const double sigma = stim.gabor_sigma_deg > 0.0 ? stim.gabor_sigma_deg : stim.size_deg / 8.0;
    const double c0 = 0.5 * (n - 1);

    Plane spatial(n, n);
    for (int y = 0; y < n; ++y)
        for (int x = 0; x < n; ++x) {
            const double u = (x - c0) / ppd, v = (y - c0) / ppd;
            double s = 1.0;
            if (stim.kind != StimulusKind::uniform) s = std::cos(2.0 * std::numbers::pi * stim.rho * u + stim.phase);
            if (stim.kind == StimulusKind::gabor) s *= std::exp(-(u * u + v * v) / (2.0 * sigma * sigma));
            spatial.at(x, y) = static_cast<float>(s);
        }

    Video out;
    out.reserve(frames);
    for (int f = 0; f < frames; ++f) {
        const double tmod = stim.omega > 0.0 && frames > 1 ? std::cos(2.0 * std::numbers::pi * stim.omega * f / stim.fps) : 1.0;
        Frame xyz(n, n);
        for (std::size_t i = 0; i < spatial.size(); ++i) {
            const Vec3 v = col.at(stim.contrast, spatial.data[i] * tmod);
            for (int c = 0; c < 3; ++c) xyz[c].data[i] = static_cast<float>(v[c]);
        }
        out.push_back(display::inverse_display(xyz, display));
    }
    return out;
}

std::vector<double> log_space(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ConfigError("log_space needs 0 < lo < hi and n >= 2");
    std::vector<double> v(n);
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) v[i] = std::pow(10.0, a + (b - a) * i / (n - 1));
    return v;
}

namespace {

double uniform_difference(double t_phys, double r_phys, VisualChannel ch, double S, const MetricParams& p) {
    const double t = masking::encode(t_phys, S, ch, p), r = masking::encode(r_phys, S, ch, p);
    return masking::soft_clamp(masking::pointwise_difference(t, r, ch, p), p.k_c);
}

}  // namespace

std::vector<CurvePoint> self_masking_curve(VisualChannel ch, double S, const std::vector<double>& contrasts,
                                           const MetricParams& p) {
    std::vector<CurvePoint> out;
    out.reserve(contrasts.size());
    for (double c : contrasts) out.push_back({c, uniform_difference(c, 0.0, ch, S, p)});
    return out;
}

std::vector<CurvePoint> masking_curve(VisualChannel ch, double S, const std::vector<double>& masks,
                                      const MetricParams& p) {
    if (!(S > 0.0)) throw ConfigError("masking curve needs S > 0");
    const double thr = 1.0 / (p.s_corr * p.s_ch[index(ch)] * S);
    std::vector<CurvePoint> out;
    out.reserve(masks.size());
    for (double m : masks) {
        auto f = [&](double d) { return uniform_difference(m + d, m, ch, S, p) - 1.0; };
        double lo = 0.0, hi = thr;
        int guard = 0;
        while (f(hi) < 0.0) {
            lo = hi;
            hi *= 2.0;
            if (++guard > 200) throw NumericalError("masking threshold not bracketed at mask " + std::to_string(m));
        }
        for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
            const double mid = 0.5 * (lo + hi);
            (f(mid) < 0.0 ? lo : hi) = mid;
        }
        out.push_back({m, hi});
    }
    return out;
}

std::vector<MetricParams> all_variants(const MetricParams& p) {
    std::vector<MetricParams> v;
    for (auto enc : {ContrastEncoding::multiplicative, ContrastEncoding::additive})
        for (auto mask : {MaskingModel::mutual, MaskingModel::transducer, MaskingModel::similarity}) {
            MetricParams q = p;
            q.encoding = enc;
            q.masking = mask;
            v.push_back(q);
        }
    return v;
}

std::string variant_name(const MetricParams& p) { return "enc=" + to_string(p.encoding) + ",mask=" + to_string(p.masking); }

MatchingConfig MatchingConfig::from_json(const nlohmann::json& j) {
    MatchingConfig c;
    if (j.contains("rho_cpd")) c.rho = j.at("rho_cpd").get<double>();
    if (j.contains("mean_luminance")) c.mean_luminance = j.at("mean_luminance").get<double>();
    if (j.contains("size_deg")) c.size_deg = j.at("size_deg").get<double>();
    if (j.contains("levels")) c.levels = j.at("levels").get<std::vector<double>>();
    if (j.contains("ratio_limit")) c.ratio_limit = j.at("ratio_limit").get<double>();
    if (j.contains("contrasts")) c.contrasts = j.at("contrasts").get<std::vector<std::array<double, 3>>>();
    if (c.levels.empty()) throw ConfigError("matching config needs at least one level");
    if (!c.contrasts.empty() && c.contrasts.size() != c.levels.size())
        throw ConfigError("matching config: one contrast triple per level");
    return c;
}

MatchingConfig MatchingConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open matching config " + path);
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("bad matching config " + path + ": " + e.what());
    }
}

double matched_contrast(const Metric& metric, VisualChannel ch, double level, double rho, double L) {
    const auto& p = metric.params();
    return level / (p.s_corr * p.s_ch[index(ch)] * metric.lut().lookup(ch, L, rho));
}

MatchingResult matching_curve(const Metric& metric, const MatchingConfig& cfg) {
    const double ppd = metric.ppd();
    const int n = std::max(8, static_cast<int>(std::lround(cfg.size_deg * ppd)));
    MatchingResult res;
    res.rho = cfg.rho;
    if (!(res.rho > 0.0)) {
        const int bands = pyramid::band_count(n, n, ppd);
        const auto freqs = pyramid::band_frequencies(bands, ppd);
        res.rho = freqs[std::min(2, bands - 2)];
    }
    Stimulus base;
    base.kind = StimulusKind::gabor;
    base.rho = res.rho;
    base.mean_luminance = cfg.mean_luminance;
    base.size_deg = cfg.size_deg;
    base.contrast = 0.0;
    const Frame ref = render_stimulus(base, metric.display(), ppd)[0];
    const double L = stimulus_background(base, metric.display())[0];

    const std::array<std::pair<VisualChannel, Vec3>, 3> dirs{
        {{VisualChannel::ach_sust, kAchDirection}, {VisualChannel::rg, kRgDirection}, {VisualChannel::yv, kYvDirection}}};
    for (std::size_t li = 0; li < cfg.levels.size(); ++li) {
        const double level = cfg.levels[li];
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t k = 0; k < dirs.size(); ++k) {
            const auto& [ch, dir] = dirs[k];
            Stimulus s = base;
            s.direction = dir;
            s.contrast = cfg.contrasts.empty() ? matched_contrast(metric, ch, level, res.rho, L) : cfg.contrasts[li][k];
            const Frame test = render_stimulus(s, metric.display(), ppd)[0];
            const auto r = metric.evaluate(test, ref);
            res.rows.push_back({ch, level, s.contrast, r.score.d_pooled, r.score.jod});
            lo = std::min(lo, r.score.d_pooled);
            hi = std::max(hi, r.score.d_pooled);
        }
        res.ratios.push_back(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());
    }
    return res;
}

std::vector<ChromaRow> chroma_ss_curves(const Metric& metric, const std::vector<Frame>& images,
                                        const std::vector<distort::ChromaSpace>& spaces,
                                        const std::vector<int>& factors) {
    std::vector<ChromaRow> rows;
    for (std::size_t i = 0; i < images.size(); ++i)
        for (auto space : spaces)
            for (int f : factors) {
                if (f < 1) throw ConfigError("subsampling factor must be >= 1");
                double jod = 10.0;
                if (f > 1) {
                    distort::DistortionConfig cfg;
                    cfg.chroma_factor = {f, f, f};
                    cfg.chroma_space = space;
                    const distort::DistortionSpec spec{distort::Kind::chroma_ss, 1, 0};
                    const Frame test = distort::apply(images[i], spec, metric.ppd(), metric.display(), cfg);
                    jod = metric.evaluate(test, images[i]).score.jod;
                }
                rows.push_back({static_cast<int>(i), space, f, jod});
            }
    return rows;
}

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(10) << v;
    return os.str();
}

std::string axis_label(double v) {
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

}  // namespace

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series, bool log_x, bool log_y) {
    const double W = 720, H = 460, ml = 70, mr = 190, mt = 40, mb = 55;
    auto tx = [&](double v) { return log_x ? std::log10(v) : v; };
    auto ty = [&](double v) { return log_y ? std::log10(v) : v; };
    auto usable = [&](const CurvePoint& p) {
        return std::isfinite(p.x) && std::isfinite(p.y) && (!log_x || p.x > 0.0) && (!log_y || p.y > 0.0);
    };
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : series)
        for (const auto& p : s.points)
            if (usable(p)) {
                x0 = std::min(x0, tx(p.x));
                x1 = std::max(x1, tx(p.x));
                y0 = std::min(y0, ty(p.y));
                y1 = std::max(y1, ty(p.y));
            }
    if (!(x1 >= x0)) x0 = 0, x1 = 1;
    if (!(y1 >= y0)) y0 = 0, y1 = 1;
    if (x1 - x0 < 1e-12) x0 -= 0.5, x1 += 0.5;
    if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
    const double pw = W - ml - mr, ph = H - mt - mb;
    auto px = [&](double v) { return ml + (tx(v) - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return mt + ph - (ty(v) - y0) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n"
       << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
        const double gx = ml + pw * i / 4, gy = mt + ph - ph * i / 4;
        os << "<line x1=\"" << gx << "\" y1=\"" << mt << "\" x2=\"" << gx << "\" y2=\"" << mt + ph
           << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << gx << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">"
           << axis_label(log_x ? std::pow(10.0, xv) : xv) << "</text>\n"
           << "<line x1=\"" << ml << "\" y1=\"" << gy << "\" x2=\"" << ml + pw << "\" y2=\"" << gy
           << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << ml - 6 << "\" y=\"" << gy + 4 << "\" text-anchor=\"end\">"
           << axis_label(log_y ? std::pow(10.0, yv) : yv) << "</text>\n";
    }
    os << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << x_label << "</text>\n"
       << "<text transform=\"translate(16," << mt + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">" << y_label
       << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const char* colour = kPalette[k % kPalette.size()];
        os << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.8\" points=\"";
        for (const auto& p : series[k].points)
            if (usable(p)) os << px(p.x) << "," << py(p.y) << " ";
        os << "\"/>\n";
        const double ly = mt + 14 + 18 * k;
        os << "<line x1=\"" << ml + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << ml + pw + 32 << "\" y2=\"" << ly
           << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n"
           << "<text x=\"" << ml + pw + 38 << "\" y=\"" << ly + 4 << "\">" << series[k].name << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
    if (!out) throw FormatError("write failed for " + path);
}

namespace {

VisualChannel channel_option(const nlohmann::json& o) {
    const std::string name = o.value("channel", std::string("A-sust"));
    for (int c = 0; c < kNumChannels; ++c)
        if (name == kChannelLabels[c]) return static_cast<VisualChannel>(c);
    throw ConfigError("unknown channel '" + name + "' (A-sust, A-trans, RG, YV)");
}

}  // namespace

std::string run_suite(const std::string& suite, const Metric& metric, const std::string& out_dir,
                      const nlohmann::json& o) {
    std::filesystem::create_directories(out_dir);
    const std::string csv_path = (std::filesystem::path(out_dir) / (suite + ".csv")).string();
    const std::string svg_path = (std::filesystem::path(out_dir) / (suite + ".svg")).string();
    std::ostringstream csv;
    std::vector<Series> series;
    const double S = o.value("sensitivity", 100.0);

    if (suite == "self_masking") {
        const VisualChannel ch = channel_option(o);
        const auto contrasts = log_space(o.value("contrast_min", 1e-4), o.value("contrast_max", 1.0), o.value("points", 61));
        csv << "variant,contrast,D\n";
        for (const auto& v : all_variants(metric.params())) {
            Series s{variant_name(v), self_masking_curve(ch, S, contrasts, v)};
            for (const auto& p : s.points) csv << '"' << s.name << "\"," << fmt(p.x) << ',' << fmt(p.y) << '\n';
            series.push_back(std::move(s));
        }
        write_text(svg_path, line_plot_svg("Self-masking (S = " + axis_label(S) + ")", "test contrast", "D", series,
                                           true, true));
    } else if (suite == "masking") {
        const VisualChannel ch = channel_option(o);
        auto masks = log_space(o.value("mask_min", 1e-4), o.value("mask_max", 1.0), o.value("points", 41));
        masks.insert(masks.begin(), 0.0);
        csv << "variant,mask,threshold\n";
        for (const auto& v : all_variants(metric.params())) {
            Series s{variant_name(v), masking_curve(ch, S, masks, v)};
            for (const auto& p : s.points) csv << '"' << s.name << "\"," << fmt(p.x) << ',' << fmt(p.y) << '\n';
            series.push_back(std::move(s));
        }
        write_text(svg_path, line_plot_svg("Contrast discrimination (S = " + axis_label(S) + ")", "mask contrast",
                                           "threshold increment", series, true, true));
    } else if (suite == "matching") {
        MatchingConfig cfg = o.contains("config") ? MatchingConfig::load(o.at("config").get<std::string>())
                                                  : MatchingConfig::from_json(o);
        const auto res = matching_curve(metric, cfg);
        csv << "direction,level,contrast,d_pooled,jod\n";
        std::array<Series, 3> per{Series{"A", {}}, Series{"RG", {}}, Series{"YV", {}}};
        for (const auto& r : res.rows) {
            const int k = r.channel == VisualChannel::ach_sust ? 0 : r.channel == VisualChannel::rg ? 1 : 2;
            csv << per[k].name << ',' << fmt(r.level) << ',' << fmt(r.contrast) << ',' << fmt(r.d_pooled) << ','
                << fmt(r.jod) << '\n';
            per[k].points.push_back({r.level, r.d_pooled});
        }
        series.assign(per.begin(), per.end());
        write_text(svg_path, line_plot_svg("Matched contrast at " + axis_label(res.rho) + " cpd", "matched level",
                                           "pooled difference", series, true, true));
    } else if (suite == "chroma_ss") {
        std::vector<Frame> images;
        if (o.contains("images")) {
            for (const auto& p : o.at("images")) images.push_back(io::read_image(p.get<std::string>()).frame);
        } else {
            const int n = o.value("size", 384);
            const std::uint64_t seed = o.value("seed", std::uint64_t{1});
            for (auto k : {content::ImageKind::landscape, content::ImageKind::shapes, content::ImageKind::texture})
                images.push_back(content::synth_image(k, n, n, seed));
        }
        const auto factors = o.value("factors", std::vector<int>{1, 2, 4, 8});
        const std::vector<distort::ChromaSpace> spaces{distort::ChromaSpace::rgb, distort::ChromaSpace::yxy,
                                                       distort::ChromaSpace::ycbcr};
        const auto rows = chroma_ss_curves(metric, images, spaces, factors);
        csv << "image,space,factor,jod\n";
        std::map<std::string, Series> by_space;
        for (const auto& r : rows) {
            csv << r.image << ',' << distort::chroma_space_name(r.space) << ',' << r.factor << ',' << fmt(r.jod) << '\n';
            if (r.image == 0) {
                auto& s = by_space[distort::chroma_space_name(r.space)];
                s.name = distort::chroma_space_name(r.space);
                s.points.push_back({static_cast<double>(r.factor), r.jod});
            }
        }
        for (auto& [k, s] : by_space) series.push_back(s);
        write_text(svg_path, line_plot_svg("Chroma subsampling (image 0)", "factor", "JOD", series, true, false));
    } else {
        throw ConfigError("unknown diagnostics suite '" + suite + "' (self_masking, masking, matching, chroma_ss)");
    }
    write_text(csv_path, csv.str());
    return csv_path;
}

}  // namespace cvvdp::diag
