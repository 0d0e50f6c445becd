#include "cvvdp/display.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <vector>

#include <json.hpp>

#include "cvvdp/error.hpp"

namespace cvvdp::display {

namespace {

constexpr double kPi = std::numbers::pi;

// SMPTE ST 2084 constants
constexpr double kPqM1 = 2610.0 / 16384.0;
constexpr double kPqM2 = 2523.0 / 4096.0 * 128.0;
constexpr double kPqC1 = 3424.0 / 4096.0;
constexpr double kPqC2 = 2413.0 / 4096.0 * 32.0;
constexpr double kPqC3 = 2392.0 / 4096.0 * 32.0;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
    return s;
}

}  // namespace

Eotf parse_eotf(const std::string& name) {
    const std::string n = lower(name);
    if (n == "srgb") return Eotf::srgb;
    if (n == "pq" || n == "st2084") return Eotf::pq;
    if (n == "gamma") return Eotf::gamma;
    if (n == "linear") return Eotf::linear;
    throw ConfigError("unknown EOTF '" + name + "'");
}

std::string eotf_name(Eotf e) {
    switch (e) {
        case Eotf::srgb: return "sRGB";
        case Eotf::pq: return "PQ";
        case Eotf::gamma: return "gamma";
        case Eotf::linear: return "linear";
    }
    return "?";
}

Mat3 primaries_matrix(double xr, double yr, double xg, double yg, double xb, double yb, double xw,
                      double yw) {
    auto xyz = [](double x, double y) { return Vec3{x / y, 1.0, (1.0 - x - y) / y}; };
    const Vec3 r = xyz(xr, yr), g = xyz(xg, yg), b = xyz(xb, yb), w = xyz(xw, yw);
    const Mat3 m{{{r[0], g[0], b[0]}, {r[1], g[1], b[1]}, {r[2], g[2], b[2]}}};
    if (std::abs(det(m)) < 1e-12) throw InvalidSpec("degenerate primaries");
    const Vec3 s = mul(inverse(m), w);
    Mat3 out;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out[i][j] = m[i][j] * s[j];
    return out;
}

Mat3 named_primaries(const std::string& name) {
    const std::string n = lower(name);
    constexpr double wx = 0.3127, wy = 0.3290;
    if (n == "bt709" || n == "srgb" || n == "rec709")
        return primaries_matrix(0.640, 0.330, 0.300, 0.600, 0.150, 0.060, wx, wy);
    if (n == "p3" || n == "p3-d65" || n == "display-p3")
        return primaries_matrix(0.680, 0.320, 0.265, 0.690, 0.150, 0.060, wx, wy);
    if (n == "bt2020" || n == "rec2020")
        return primaries_matrix(0.708, 0.292, 0.170, 0.797, 0.131, 0.046, wx, wy);
    throw ConfigError("unknown primaries preset '" + name + "'");
}

void DisplaySpec::validate() const {
    if (!(width_m > 0.0) || !(viewing_distance_m > 0.0) || resolution_w <= 0 || resolution_h <= 0)
        throw InvalidSpec("display '" + name + "': geometry must be positive");
    if (!(L_peak > L_black) || !(L_black >= 0.0))
        throw InvalidSpec("display '" + name + "': need L_peak > L_black >= 0");
    if (!(k_refl >= 0.0 && k_refl <= 1.0)) throw InvalidSpec("display '" + name + "': k_refl outside [0,1]");
    if (!(E_amb >= 0.0)) throw InvalidSpec("display '" + name + "': negative ambient");
    if (eotf == Eotf::gamma && !(gamma > 0.0)) throw InvalidSpec("display '" + name + "': gamma must be > 0");
    if (std::abs(det(rgb_to_xyz)) < 1e-12) throw InvalidSpec("display '" + name + "': singular primaries");
    if (ppd_override && !(*ppd_override > 0.0)) throw InvalidSpec("display '" + name + "': ppd must be > 0");
}

double compute_ppd(const DisplaySpec& spec) {
    if (!(spec.width_m > 0.0) || !(spec.viewing_distance_m > 0.0) || spec.resolution_w <= 0)
        throw InvalidSpec("non-positive display geometry");
    return kPi / (360.0 * std::atan(0.5 * spec.width_m / (spec.resolution_w * spec.viewing_distance_m)));
}

double effective_ppd(const DisplaySpec& spec) {
    return spec.ppd_override ? *spec.ppd_override : compute_ppd(spec);
}

double reflected_luminance(double k_refl, double E_amb) { return k_refl * E_amb / kPi; }

double pq_eotf(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const double p = std::pow(v, 1.0 / kPqM2);
    return 10000.0 * std::pow(std::max(p - kPqC1, 0.0) / (kPqC2 - kPqC3 * p), 1.0 / kPqM1);
}

double pq_inverse(double L) {
    const double y = std::pow(std::clamp(L / 10000.0, 0.0, 1.0), kPqM1);
    return std::pow((kPqC1 + kPqC2 * y) / (1.0 + kPqC3 * y), kPqM2);
}

double eotf_normalized(Eotf e, double v, double gamma) {
    switch (e) {
        case Eotf::srgb:
            return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
        case Eotf::pq: return pq_eotf(v) / 10000.0;
        case Eotf::gamma: return std::pow(std::max(v, 0.0), gamma);
        case Eotf::linear: return v;
    }
    throw ConfigError("unknown EOTF");
}

double inverse_eotf_normalized(Eotf e, double l, double gamma) {
    switch (e) {
        case Eotf::srgb:
            return l <= 0.0031308 ? 12.92 * l : 1.055 * std::pow(l, 1.0 / 2.4) - 0.055;
        case Eotf::pq: return pq_inverse(l * 10000.0);
        case Eotf::gamma: return std::pow(std::max(l, 0.0), 1.0 / gamma);
        case Eotf::linear: return l;
    }
    throw ConfigError("unknown EOTF");
}

double channel_luminance(const DisplaySpec& spec, double v) {
    const double refl = reflected_luminance(spec.k_refl, spec.E_amb);
    const double vc = std::clamp(v, 0.0, 1.0);
    if (spec.eotf == Eotf::pq) return std::min(pq_eotf(vc) + spec.L_black, spec.L_peak) + refl;
    const double e = eotf_normalized(spec.eotf, vc, spec.gamma);
    return std::min((spec.L_peak - spec.L_black) * e + spec.L_black, spec.L_peak) + refl;
}

namespace {

struct ChannelMap {
    const DisplaySpec& spec;
    double refl;
    double scale;

    float operator()(float v) const {
        if (spec.eotf == Eotf::pq)
            return static_cast<float>(std::min(pq_eotf(v) + spec.L_black, spec.L_peak) + refl);
        float e;
        switch (spec.eotf) {
            case Eotf::srgb:
                e = v <= 0.04045f ? v / 12.92f : std::pow((v + 0.055f) / 1.055f, 2.4f);
                break;
            case Eotf::gamma: e = std::pow(v, static_cast<float>(spec.gamma)); break;
            default: e = v; break;
        }
        return static_cast<float>(std::min(scale * e + spec.L_black, spec.L_peak) + refl);
    }
};

// ChannelMap sampled on a uniform grid over [0,1], linearly interpolated.
class ChannelTable {
public:
    static constexpr int kSegments = 16384;

    explicit ChannelTable(const ChannelMap& map) : table_(kSegments + 2) {
        for (int i = 0; i <= kSegments; ++i) table_[i] = map(static_cast<float>(static_cast<double>(i) / kSegments));
        table_[kSegments + 1] = table_[kSegments];
    }

    float operator()(float v) const {
        const float x = v * kSegments;
        const int i = static_cast<int>(x);
        const float f = x - static_cast<float>(i);
        return table_[i] + f * (table_[i + 1] - table_[i]);
    }

private:
    std::vector<float> table_;
};

}  // namespace

Frame linear_rgb(const Frame& input, const DisplaySpec& spec, InputEncoding encoding, ForwardStats* stats) {
    const int w = input.width(), h = input.height();
    const std::size_t n = static_cast<std::size_t>(w) * h;
    const double refl = reflected_luminance(spec.k_refl, spec.E_amb);
    const ChannelTable map(ChannelMap{spec, refl, spec.L_peak - spec.L_black});
    std::size_t clamped = 0;

    Frame lin(w, h);
    for (int c = 0; c < 3; ++c) {
        const float* src = input[c].data.data();
        float* dst = lin[c].data.data();
        if (encoding == InputEncoding::absolute_linear) {
            for (std::size_t i = 0; i < n; ++i) {
                float v = src[i];
                if (!(v >= 0.0f)) {
                    v = 0.0f;
                    ++clamped;
                }
                dst[i] = static_cast<float>(std::min<double>(v + spec.L_black, spec.L_peak) + refl);
            }
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                float v = src[i];
                if (!(v >= 0.0f)) {
                    v = 0.0f;
                    ++clamped;
                } else if (v > 1.0f) {
                    v = 1.0f;
                    ++clamped;
                }
                dst[i] = map(v);
            }
        }
    }
    if (stats) stats->clamped += clamped;
    return lin;
}

Frame forward_display(const Frame& input, const DisplaySpec& spec, InputEncoding encoding,
                      ForwardStats* stats) {
    Frame lin = linear_rgb(input, spec, encoding, stats);
    const int w = lin.width(), h = lin.height();
    const std::size_t n = lin[0].size();
    const Mat3& m = spec.rgb_to_xyz;
    Frame xyz(w, h);
    const float m00 = m[0][0], m01 = m[0][1], m02 = m[0][2];
    const float m10 = m[1][0], m11 = m[1][1], m12 = m[1][2];
    const float m20 = m[2][0], m21 = m[2][1], m22 = m[2][2];
    const float* r = lin[0].data.data();
    const float* g = lin[1].data.data();
    const float* b = lin[2].data.data();
    float* X = xyz[0].data.data();
    float* Y = xyz[1].data.data();
    float* Z = xyz[2].data.data();
    for (std::size_t i = 0; i < n; ++i) {
        X[i] = m00 * r[i] + m01 * g[i] + m02 * b[i];
        Y[i] = m10 * r[i] + m11 * g[i] + m12 * b[i];
        Z[i] = m20 * r[i] + m21 * g[i] + m22 * b[i];
    }
    return xyz;
}

Frame inverse_display(const Frame& xyz, const DisplaySpec& spec, bool* in_gamut) {
    const int w = xyz.width(), h = xyz.height();
    const Mat3 inv = inverse(spec.rgb_to_xyz);
    const double refl = reflected_luminance(spec.k_refl, spec.E_amb);
    const double tol = 1e-6;
    bool ok = true;
    Frame out(w, h);
    for (std::size_t i = 0; i < xyz[0].size(); ++i) {
        const Vec3 rgb = mul(inv, Vec3{xyz[0].data[i], xyz[1].data[i], xyz[2].data[i]});
        for (int c = 0; c < 3; ++c) {
            const double L = rgb[c] - refl;
            double v;
            if (spec.eotf == Eotf::pq) {
                const double abs_l = L - spec.L_black;
                if (abs_l < -tol * spec.L_peak || L > spec.L_peak * (1 + tol)) ok = false;
                v = pq_inverse(std::max(abs_l, 0.0));
            } else {
                const double e = (L - spec.L_black) / (spec.L_peak - spec.L_black);
                if (e < -tol || e > 1.0 + tol) ok = false;
                v = inverse_eotf_normalized(spec.eotf, std::clamp(e, 0.0, 1.0), spec.gamma);
            }
            out[c].data[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
        }
    }
    if (in_gamut) *in_gamut = ok;
    return out;
}

namespace {

DisplaySpec make_eizo() {
    DisplaySpec d;
    d.name = "eizo_cg3146";
    d.resolution_w = 4096;
    d.resolution_h = 2160;
    d.width_m = 31.1 * 0.0254 * 4096.0 / std::hypot(4096.0, 2160.0);
    d.viewing_distance_m = 0.73;
    d.L_peak = 300.0;
    d.L_black = 0.0003;
    d.k_refl = 0.005;
    d.E_amb = 10.0;
    d.eotf = Eotf::srgb;
    d.rgb_to_xyz = named_primaries("p3");
    d.ppd_override = 77.0;
    return d;
}

DisplaySpec make_office() {
    DisplaySpec d;
    d.name = "sdr_office";
    d.resolution_w = 1920;
    d.resolution_h = 1080;
    d.width_m = 24.0 * 0.0254 * 1920.0 / std::hypot(1920.0, 1080.0);
    d.viewing_distance_m = 0.6;
    d.L_peak = 200.0;
    d.L_black = 0.2;
    d.k_refl = 0.005;
    d.E_amb = 250.0;
    d.eotf = Eotf::srgb;
    d.rgb_to_xyz = named_primaries("bt709");
    return d;
}

DisplaySpec make_hdr() {
    DisplaySpec d;
    d.name = "hdr_pq_4k";
    d.resolution_w = 3840;
    d.resolution_h = 2160;
    d.width_m = 30.0 * 0.0254 * 3840.0 / std::hypot(3840.0, 2160.0);
    d.viewing_distance_m = 0.7;
    d.L_peak = 1000.0;
    d.L_black = 0.005;
    d.k_refl = 0.005;
    d.E_amb = 10.0;
    d.eotf = Eotf::pq;
    d.rgb_to_xyz = named_primaries("bt2020");
    return d;
}

// Small-window preset used by the test corpus: 40 ppd, sRGB office photometry.
DisplaySpec make_test40() {
    DisplaySpec d = make_office();
    d.name = "sdr_40ppd";
    d.ppd_override = 40.0;
    return d;
}

double num(const nlohmann::json& j, const char* key, double fallback) {
    return j.contains(key) ? j.at(key).get<double>() : fallback;
}

DisplaySpec parse_display(const std::string& name, const nlohmann::json& j) {
    DisplaySpec d;
    d.name = name;
    try {
        if (j.contains("resolution")) {
            d.resolution_w = j.at("resolution").at(0).get<int>();
            d.resolution_h = j.at("resolution").at(1).get<int>();
        }
        if (j.contains("width_m"))
            d.width_m = j.at("width_m").get<double>();
        else if (j.contains("diagonal_in"))
            d.width_m = j.at("diagonal_in").get<double>() * 0.0254 * d.resolution_w /
                        std::hypot(static_cast<double>(d.resolution_w), static_cast<double>(d.resolution_h));
        d.viewing_distance_m = num(j, "viewing_distance_m", d.viewing_distance_m);
        d.L_peak = num(j, "L_peak", d.L_peak);
        if (j.contains("L_black"))
            d.L_black = j.at("L_black").get<double>();
        else if (j.contains("contrast"))
            d.L_black = d.L_peak / j.at("contrast").get<double>();
        d.k_refl = num(j, "k_refl", d.k_refl);
        d.E_amb = num(j, "E_amb", d.E_amb);
        if (j.contains("eotf")) d.eotf = parse_eotf(j.at("eotf").get<std::string>());
        d.gamma = num(j, "gamma", d.gamma);
        if (j.contains("primaries")) {
            const auto& p = j.at("primaries");
            if (p.is_string()) {
                d.rgb_to_xyz = named_primaries(p.get<std::string>());
            } else {
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) d.rgb_to_xyz[r][c] = p.at(r).at(c).get<double>();
            }
        }
        const bool use_quoted = j.value("use_quoted_ppd", false);
        if (j.contains("ppd")) d.ppd_override = j.at("ppd").get<double>();
        else if (use_quoted && j.contains("ppd_quoted")) d.ppd_override = j.at("ppd_quoted").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("display '" + name + "': " + e.what());
    }
    d.validate();
    return d;
}

}  // namespace

std::map<std::string, DisplaySpec> builtin_displays() {
    std::map<std::string, DisplaySpec> m;
    for (auto d : {make_eizo(), make_office(), make_hdr(), make_test40()}) m[d.name] = d;
    return m;
}

std::map<std::string, DisplaySpec> load_displays(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open display config " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    const auto& entries = j.contains("displays") ? j.at("displays") : j;
    std::map<std::string, DisplaySpec> m;
    for (auto it = entries.begin(); it != entries.end(); ++it) m[it.key()] = parse_display(it.key(), it.value());
    return m;
}

DisplaySpec find_display(const std::string& name, const std::string& config_path) {
    if (!config_path.empty()) {
        auto m = load_displays(config_path);
        if (auto it = m.find(name); it != m.end()) return it->second;
    }
    auto b = builtin_displays();
    if (auto it = b.find(name); it != b.end()) return it->second;
    throw ConfigError("unknown display '" + name + "'");
}

}  // namespace cvvdp::display
