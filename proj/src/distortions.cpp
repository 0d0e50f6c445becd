#include "cvvdp/distortions.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>

#include "cvvdp/error.hpp"
#include "cvvdp/io.hpp"
#include "cvvdp/masking.hpp"

namespace cvvdp::distort {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Uniform and normal draws with a fixed algorithm so outputs do not depend
// on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : g_(splitmix(seed)) {}
    double uniform() { return (g_() >> 11) * 0x1.0p-53; }
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
        has_spare_ = true;
        return r * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 g_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

enum Stream : std::uint64_t { kTile = 1, kLsnu = 2, kPattern = 3, kDce = 4, kOffsets = 5 };

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t sub = 0) {
    return splitmix(splitmix(seed ^ (stream * 0x100000001b3ull)) + sub);
}

float sample_bilinear(const Plane& p, double x, double y) {
    x = std::clamp(x, 0.0, static_cast<double>(p.width - 1));
    y = std::clamp(y, 0.0, static_cast<double>(p.height - 1));
    const int x0 = std::min(static_cast<int>(x), p.width - 2 < 0 ? 0 : p.width - 2);
    const int y0 = std::min(static_cast<int>(y), p.height - 2 < 0 ? 0 : p.height - 2);
    const int x1 = std::min(x0 + 1, p.width - 1), y1 = std::min(y0 + 1, p.height - 1);
    const float fx = static_cast<float>(x - x0), fy = static_cast<float>(y - y0);
    const float a = p.at(x0, y0) + fx * (p.at(x1, y0) - p.at(x0, y0));
    const float b = p.at(x0, y1) + fx * (p.at(x1, y1) - p.at(x0, y1));
    return a + fy * (b - a);
}

// Content moved by (dx, dy) pixels.
Plane shift(const Plane& p, double dx, double dy) {
    Plane out(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) out.at(x, y) = sample_bilinear(p, x - dx, y - dy);
    return out;
}

// Content scaled about the frame centre so that it loses `px` pixels in
// each dimension.
Plane shrink(const Plane& p, double px) {
    const double sx = (p.width - px) / p.width, sy = (p.height - px) / p.height;
    const double cx = 0.5 * (p.width - 1), cy = 0.5 * (p.height - 1);
    Plane out(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x) out.at(x, y) = sample_bilinear(p, cx + (x - cx) / sx, cy + (y - cy) / sy);
    return out;
}

// Box average over f x f blocks, then bilinear back to the full size.
Plane subsample(const Plane& p, int f) {
    const int sw = (p.width + f - 1) / f, sh = (p.height + f - 1) / f;
    Plane small(sw, sh);
    for (int j = 0; j < sh; ++j)
        for (int i = 0; i < sw; ++i) {
            double s = 0.0;
            int n = 0;
            for (int y = j * f; y < std::min((j + 1) * f, p.height); ++y)
                for (int x = i * f; x < std::min((i + 1) * f, p.width); ++x) {
                    s += p.at(x, y);
                    ++n;
                }
            small.at(i, j) = static_cast<float>(s / n);
        }
    Plane out(p.width, p.height);
    for (int y = 0; y < p.height; ++y)
        for (int x = 0; x < p.width; ++x)
            out.at(x, y) = sample_bilinear(small, (x + 0.5) / f - 0.5, (y + 0.5) / f - 0.5);
    return out;
}

void clamp01(Frame& f) {
    for (auto& pl : f.c)
        for (auto& v : pl.data) v = std::clamp(v, 0.0f, 1.0f);
}

template <class T, std::size_t N>
void read_array(const nlohmann::json& j, const char* key, std::array<T, N>& out) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != N) throw ConfigError(std::string("distortion config: '") + key + "' needs " + std::to_string(N) + " values");
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i].get<T>();
}

}  // namespace

Kind parse_kind(const std::string& name) {
    for (Kind k : kAllKinds)
        if (kind_name(k) == name) return k;
    throw ConfigError("unknown distortion kind '" + name + "' (dither, lsnu, blur, contrast, wgnu, dce, fringes, chroma_ss)");
}

std::string kind_name(Kind k) {
    switch (k) {
        case Kind::dither: return "dither";
        case Kind::lsnu: return "lsnu";
        case Kind::blur: return "blur";
        case Kind::contrast: return "contrast";
        case Kind::wgnu: return "wgnu";
        case Kind::dce: return "dce";
        case Kind::fringes: return "fringes";
        case Kind::chroma_ss: return "chroma_ss";
    }
    return "?";
}

void DistortionSpec::validate() const {
    if (level < 0 || level > 3) throw ConfigError("distortion level must be 1, 2 or 3 (0 for identity)");
}

ChromaSpace parse_chroma_space(const std::string& name) {
    if (name == "ycbcr") return ChromaSpace::ycbcr;
    if (name == "yxy") return ChromaSpace::yxy;
    if (name == "rgb") return ChromaSpace::rgb;
    throw ConfigError("unknown chroma space '" + name + "' (ycbcr, yxy, rgb)");
}

std::string chroma_space_name(ChromaSpace s) {
    return s == ChromaSpace::ycbcr ? "ycbcr" : (s == ChromaSpace::yxy ? "yxy" : "rgb");
}

nlohmann::json DistortionConfig::to_json() const {
    nlohmann::json j;
    j["dither_bits"] = dither_bits;
    j["lsnu_sigma"] = lsnu_sigma;
    j["lsnu_truncation"] = lsnu_truncation;
    j["blur_sigma_px77"] = blur_sigma_px77;
    j["blur_green_shrink_px77"] = blur_green_shrink_px77;
    j["contrast_ratio"] = contrast_ratio;
    j["wgnu_amplitude"] = wgnu_amplitude;
    j["wgnu_cycles"] = wgnu_cycles;
    j["wgnu_max_cpd"] = wgnu_max_cpd;
    j["wgnu_components"] = wgnu_components;
    j["dce_sigma_deg"] = dce_sigma_deg;
    j["dce_gain"] = dce_gain;
    j["fringe_shift"] = fringe_shift;
    j["chroma_factor"] = chroma_factor;
    j["chroma_space"] = chroma_space_name(chroma_space);
    return j;
}

DistortionConfig DistortionConfig::from_json(const nlohmann::json& j) {
    DistortionConfig c;
    try {
        read_array(j, "dither_bits", c.dither_bits);
        read_array(j, "lsnu_sigma", c.lsnu_sigma);
        c.lsnu_truncation = j.value("lsnu_truncation", c.lsnu_truncation);
        read_array(j, "blur_sigma_px77", c.blur_sigma_px77);
        read_array(j, "blur_green_shrink_px77", c.blur_green_shrink_px77);
        read_array(j, "contrast_ratio", c.contrast_ratio);
        read_array(j, "wgnu_amplitude", c.wgnu_amplitude);
        read_array(j, "wgnu_cycles", c.wgnu_cycles);
        c.wgnu_max_cpd = j.value("wgnu_max_cpd", c.wgnu_max_cpd);
        c.wgnu_components = j.value("wgnu_components", c.wgnu_components);
        read_array(j, "dce_sigma_deg", c.dce_sigma_deg);
        c.dce_gain = j.value("dce_gain", c.dce_gain);
        if (j.contains("fringe_shift")) c.fringe_shift = j.at("fringe_shift").get<decltype(c.fringe_shift)>();
        read_array(j, "chroma_factor", c.chroma_factor);
        if (j.contains("chroma_space")) c.chroma_space = parse_chroma_space(j.at("chroma_space").get<std::string>());
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("distortion config: ") + e.what());
    }
    for (int b : c.dither_bits)
        if (b < 1 || b > 16) throw ConfigError("dither bits must be in 1..16");
    for (int f : c.chroma_factor)
        if (f < 1) throw ConfigError("chroma factor must be >= 1");
    for (double r : c.contrast_ratio)
        if (!(r > 1.0)) throw ConfigError("contrast ratio must be > 1");
    if (c.wgnu_components < 1) throw ConfigError("wgnu_components must be >= 1");
    return c;
}

DistortionConfig DistortionConfig::load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open distortion config " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ConfigError("distortion config " + path + ": " + e.what());
    }
    return from_json(j);
}

std::vector<float> blue_noise_tile(std::uint64_t seed, int size) {
    const int n = size * size;
    const double sigma = 1.5;
    // Toroidal Gaussian energy kernel indexed by wrapped offset.
    std::vector<double> kernel(n);
    for (int dy = 0; dy < size; ++dy)
        for (int dx = 0; dx < size; ++dx) {
            const int ox = std::min(dx, size - dx), oy = std::min(dy, size - dy);
            kernel[dy * size + dx] = std::exp(-(ox * ox + oy * oy) / (2.0 * sigma * sigma));
        }
    std::vector<char> bits(n, 0);
    std::vector<double> energy(n, 0.0);
    auto update = [&](int p, double sign) {
        const int px = p % size, py = p / size;
        for (int y = 0; y < size; ++y) {
            const int dy = (y - py + size) % size;
            for (int x = 0; x < size; ++x) energy[y * size + x] += sign * kernel[dy * size + (x - px + size) % size];
        }
    };
    auto tightest_cluster = [&] {
        int best = -1;
        for (int i = 0; i < n; ++i)
            if (bits[i] && (best < 0 || energy[i] > energy[best])) best = i;
        if (best < 0) throw NumericalError("blue noise: empty pattern");
        return best;
    };
    auto largest_void = [&] {
        int best = -1;
        for (int i = 0; i < n; ++i)
            if (!bits[i] && (best < 0 || energy[i] < energy[best])) best = i;
        if (best < 0) throw NumericalError("blue noise: full pattern");
        return best;
    };

    Rng rng(stream_seed(seed, kTile));
    const int initial = n / 10;
    for (int placed = 0; placed < initial;) {
        const int p = static_cast<int>(rng.uniform() * n);
        if (bits[p]) continue;
        bits[p] = 1;
        update(p, 1.0);
        ++placed;
    }
    for (int iter = 0; iter < 4 * n; ++iter) {
        const int c = tightest_cluster();
        bits[c] = 0;
        update(c, -1.0);
        const int v = largest_void();
        bits[v] = 1;
        update(v, 1.0);
        if (v == c) break;
    }
    const std::vector<char> proto = bits;
    const std::vector<double> proto_energy = energy;
    std::vector<int> rank(n, -1);
    for (int r = initial - 1; r >= 0; --r) {
        const int c = tightest_cluster();
        bits[c] = 0;
        update(c, -1.0);
        rank[c] = r;
    }
    bits = proto;
    energy = proto_energy;
    for (int r = initial; r < n; ++r) {
        const int v = largest_void();
        bits[v] = 1;
        update(v, 1.0);
        rank[v] = r;
    }
    std::vector<float> tile(n);
    for (int i = 0; i < n; ++i) tile[i] = static_cast<float>((rank[i] + 0.5) / n);
    return tile;
}

double Distorter::Pattern::eval(double x, double y) const {
    double s = 0.0;
    for (std::size_t k = 0; k < fx.size(); ++k) s += amp[k] * std::sin(2.0 * std::numbers::pi * (fx[k] * x + fy[k] * y) + phase[k]);
    return s;
}

Distorter::Distorter(const DistortionSpec& spec, int width, int height, int frames, double ppd,
                     const display::DisplaySpec& display, const DistortionConfig& config)
    : spec_(spec), w_(width), h_(height), frames_(std::max(1, frames)), ppd_(ppd), display_(display), cfg_(config) {
    spec_.validate();
    if (!(ppd_ > 0.0)) throw ConfigError("distortions need ppd > 0");
    if (spec_.level == 0) return;
    const int li = spec_.level - 1;
    switch (spec_.kind) {
        case Kind::dither: tile_ = blue_noise_tile(spec_.seed); break;
        case Kind::lsnu: {
            const double sigma = cfg_.lsnu_sigma[li], lim = cfg_.lsnu_truncation * sigma;
            for (int c = 0; c < 3; ++c) {
                Rng rng(stream_seed(spec_.seed, kLsnu, c));
                lsnu_gain_[c] = Plane(w_, h_);
                for (auto& g : lsnu_gain_[c].data) g = static_cast<float>(1.0 + std::clamp(sigma * rng.normal(), -lim, lim));
            }
            break;
        }
        case Kind::wgnu:
        case Kind::dce: {
            // Random sinusoids between 0.1 and the cutoff frequency, normalized so
            // that the maximum |P| over the frame is 1.
            for (int c = 0; c < 3; ++c)
                for (int k = 0; k < 2; ++k) {
                    Rng rng(stream_seed(spec_.seed, kPattern, c * 2 + k));
                    Pattern& p = patterns_[c][k];
                    for (int i = 0; i < cfg_.wgnu_components; ++i) {
                        const double f = (0.1 + (cfg_.wgnu_max_cpd - 0.1) * rng.uniform()) / ppd_;
                        const double th = 2.0 * std::numbers::pi * rng.uniform();
                        p.fx.push_back(f * std::cos(th));
                        p.fy.push_back(f * std::sin(th));
                        p.phase.push_back(2.0 * std::numbers::pi * rng.uniform());
                        p.amp.push_back(0.5 + rng.uniform());
                    }
                    double mx = 0.0;
                    const int step = std::max(1, std::min(w_, h_) / 128);
                    for (int y = 0; y < h_; y += step)
                        for (int x = 0; x < w_; x += step) mx = std::max(mx, std::abs(p.eval(x, y)));
                    for (double& a : p.amp) a /= std::max(mx, 1e-12);
                }
            if (spec_.kind == Kind::dce) {
                Rng rng(stream_seed(spec_.seed, kDce));
                const double s = cfg_.dce_sigma_deg[li] * ppd_;
                for (int f = 0; f < frames_; ++f) dce_offsets_.push_back({s * rng.normal(), s * rng.normal()});
            }
            break;
        }
        default: break;
    }
}

Frame Distorter::to_linear(const Frame& f) const {
    Frame out = f;
    for (auto& pl : out.c)
        for (auto& v : pl.data)
            v = static_cast<float>(display::eotf_normalized(display_.eotf, std::clamp(v, 0.0f, 1.0f), display_.gamma));
    return out;
}

Frame Distorter::from_linear(const Frame& f) const {
    Frame out = f;
    for (auto& pl : out.c)
        for (auto& v : pl.data)
            v = static_cast<float>(display::inverse_eotf_normalized(display_.eotf, std::clamp(v, 0.0f, 1.0f), display_.gamma));
    return out;
}

Frame Distorter::gain_field(const Frame& encoded, int frame_index) const {
    const int li = spec_.level - 1;
    Frame lin = to_linear(encoded);
    for (int c = 0; c < 3; ++c) {
        const auto& pat = patterns_[c];
        if (spec_.kind == Kind::wgnu) {
            const double t = frames_ > 1 ? static_cast<double>(frame_index) / (frames_ - 1) : 0.0;
            const double a = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * cfg_.wgnu_cycles[li] * t);
            const double m = cfg_.wgnu_amplitude[li];
            for (int y = 0; y < h_; ++y)
                for (int x = 0; x < w_; ++x) {
                    const double p = (1.0 - a) * pat[0].eval(x, y) + a * pat[1].eval(x, y);
                    lin[c].at(x, y) *= static_cast<float>(std::max(0.0, 1.0 + m * p));
                }
        } else {
            const auto& e = dce_offsets_[std::min<std::size_t>(frame_index, dce_offsets_.size() - 1)];
            for (int y = 0; y < h_; ++y)
                for (int x = 0; x < w_; ++x) {
                    const double d = pat[0].eval(x + e[0], y + e[1]) - pat[0].eval(x, y);
                    lin[c].at(x, y) *= static_cast<float>(std::max(0.0, 1.0 + cfg_.dce_gain * d));
                }
        }
    }
    return from_linear(lin);
}

Frame Distorter::apply(const Frame& encoded, int frame_index) const {
    if (encoded.width() != w_ || encoded.height() != h_) throw DomainError("frame size does not match the distorter");
    if (spec_.level == 0) return encoded;
    const int li = spec_.level - 1;
    switch (spec_.kind) {
        case Kind::dither: {
            const int levels = (1 << cfg_.dither_bits[li]) - 1;
            const int ts = 64;
            Frame out(w_, h_);
            for (int c = 0; c < 3; ++c) {
                Rng rng(stream_seed(spec_.seed, kOffsets, static_cast<std::uint64_t>(frame_index) * 3 + c));
                const int ox = static_cast<int>(rng.uniform() * ts), oy = static_cast<int>(rng.uniform() * ts);
                for (int y = 0; y < h_; ++y)
                    for (int x = 0; x < w_; ++x) {
                        const float t = tile_[((y + oy) % ts) * ts + (x + ox) % ts];
                        const float v = std::clamp(encoded[c].at(x, y), 0.0f, 1.0f);
                        const float q = std::min(std::floor(v * levels + t), static_cast<float>(levels));
                        out[c].at(x, y) = q / levels;
                    }
            }
            return out;
        }
        case Kind::lsnu: {
            Frame lin = to_linear(encoded);
            for (int c = 0; c < 3; ++c)
                for (std::size_t i = 0; i < lin[c].size(); ++i) lin[c].data[i] *= lsnu_gain_[c].data[i];
            return from_linear(lin);
        }
        case Kind::blur: {
            Frame lin = to_linear(encoded);
            const double sigma = cfg_.blur_sigma_px77[li] * ppd_ / 77.0;
            for (auto& pl : lin.c) masking::gaussian_blur(pl, sigma);
            if (cfg_.blur_green_shrink_px77[li] > 0.0) lin[1] = shrink(lin[1], cfg_.blur_green_shrink_px77[li] * ppd_ / 77.0);
            return from_linear(lin);
        }
        case Kind::contrast: {
            // One remap for all channels so the hue is kept.
            Frame lin = to_linear(encoded);
            float lo = std::numeric_limits<float>::max(), hi = 0.0f;
            for (const auto& pl : lin.c) {
                const auto [mn, mx] = std::minmax_element(pl.data.begin(), pl.data.end());
                lo = std::min(lo, *mn);
                hi = std::max(hi, *mx);
            }
            const double r = cfg_.contrast_ratio[li];
            const double new_lo = hi / r;
            if (!(hi > lo) || lo >= new_lo) return encoded;  // already within the ratio
            const double s = (hi - new_lo) / (hi - lo);
            for (auto& pl : lin.c)
                for (auto& v : pl.data) v = static_cast<float>(new_lo + (v - lo) * s);
            return from_linear(lin);
        }
        case Kind::wgnu:
        case Kind::dce: return gain_field(encoded, frame_index);
        case Kind::fringes: {
            Frame lin = to_linear(encoded);
            const auto& s = cfg_.fringe_shift[li];
            lin[0] = shift(lin[0], s[0], s[1]);
            lin[2] = shift(lin[2], s[2], s[3]);
            Frame out = from_linear(lin);
            out[1] = encoded[1];
            return out;
        }
        case Kind::chroma_ss: {
            const int f = cfg_.chroma_factor[li];
            switch (cfg_.chroma_space) {
                case ChromaSpace::rgb: {
                    Frame out(w_, h_);
                    for (int c = 0; c < 3; ++c) out[c] = subsample(encoded[c], f);
                    clamp01(out);
                    return out;
                }
                case ChromaSpace::ycbcr: {
                    constexpr float kr = 0.2126f, kb = 0.0722f, kg = 1.0f - kr - kb;
                    const std::size_t n = encoded[0].size();
                    Plane Y(w_, h_), Cb(w_, h_), Cr(w_, h_);
                    for (std::size_t i = 0; i < n; ++i) {
                        const float r = encoded[0].data[i], g = encoded[1].data[i], b = encoded[2].data[i];
                        Y.data[i] = kr * r + kg * g + kb * b;
                        Cb.data[i] = (b - Y.data[i]) / (2.0f - 2.0f * kb);
                        Cr.data[i] = (r - Y.data[i]) / (2.0f - 2.0f * kr);
                    }
                    Cb = subsample(Cb, f);
                    Cr = subsample(Cr, f);
                    Frame out(w_, h_);
                    for (std::size_t i = 0; i < n; ++i) {
                        const float r = Y.data[i] + (2.0f - 2.0f * kr) * Cr.data[i];
                        const float b = Y.data[i] + (2.0f - 2.0f * kb) * Cb.data[i];
                        out[0].data[i] = r;
                        out[1].data[i] = (Y.data[i] - kr * r - kb * b) / kg;
                        out[2].data[i] = b;
                    }
                    clamp01(out);
                    return out;
                }
                case ChromaSpace::yxy: {
                    const Frame lin = to_linear(encoded);
                    const Mat3& m = display_.rgb_to_xyz;
                    const Mat3 inv = inverse(m);
                    const std::size_t n = lin[0].size();
                    Plane Y(w_, h_), cx(w_, h_), cy(w_, h_);
                    const Vec3 white = mul(m, Vec3{1.0, 1.0, 1.0});
                    const double ws = white[0] + white[1] + white[2];
                    for (std::size_t i = 0; i < n; ++i) {
                        const Vec3 xyz = mul(m, Vec3{lin[0].data[i], lin[1].data[i], lin[2].data[i]});
                        const double s = xyz[0] + xyz[1] + xyz[2];
                        Y.data[i] = static_cast<float>(xyz[1]);
                        cx.data[i] = static_cast<float>(s > 1e-9 ? xyz[0] / s : white[0] / ws);
                        cy.data[i] = static_cast<float>(s > 1e-9 ? xyz[1] / s : white[1] / ws);
                    }
                    cx = subsample(cx, f);
                    cy = subsample(cy, f);
                    Frame out(w_, h_);
                    for (std::size_t i = 0; i < n; ++i) {
                        const double yy = std::max<double>(cy.data[i], 1e-6);
                        const double X = cx.data[i] * Y.data[i] / yy;
                        const double Z = (1.0 - cx.data[i] - cy.data[i]) * Y.data[i] / yy;
                        const Vec3 rgb = mul(inv, Vec3{X, Y.data[i], Z});
                        for (int c = 0; c < 3; ++c) out[c].data[i] = static_cast<float>(rgb[c]);
                    }
                    return from_linear(out);
                }
            }
            break;
        }
    }
    return encoded;
}

Video apply(const Video& in, const DistortionSpec& spec, double ppd, const display::DisplaySpec& display,
            const DistortionConfig& config) {
    if (in.empty()) return {};
    const Distorter d(spec, in[0].width(), in[0].height(), static_cast<int>(in.size()), ppd, display, config);
    Video out;
    out.reserve(in.size());
    for (std::size_t f = 0; f < in.size(); ++f) out.push_back(d.apply(in[f], static_cast<int>(f)));
    return out;
}

Frame apply(const Frame& in, const DistortionSpec& spec, double ppd, const display::DisplaySpec& display,
            const DistortionConfig& config) {
    const Distorter d(spec, in.width(), in.height(), 1, ppd, display, config);
    return d.apply(in, 0);
}

std::uint64_t derive_seed(std::uint64_t base, const std::string& reference, Kind kind, int level) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : reference) h = (h ^ c) * 1099511628211ull;
    return splitmix(base ^ splitmix(h + static_cast<std::uint64_t>(kind) * 16 + level));
}

std::vector<ManifestRow> generate_corpus(const std::vector<std::string>& references, const std::string& out_dir,
                                         const display::DisplaySpec& display, std::uint64_t base_seed,
                                         const DistortionConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const double ppd = display::effective_ppd(display);
    std::vector<ManifestRow> rows;
    for (const auto& ref : references) {
        auto src = io::open_source(ref, {.prefetch = false});
        Video frames;
        Frame f;
        while (src->read(f)) frames.push_back(f);
        const SourceInfo info = src->info();
        const std::string stem = fs::path(ref).stem().string();
        const std::string ext = fs::path(ref).extension().string();
        const bool image = frames.size() == 1 && info.fps <= 0.0;
        for (Kind k : kAllKinds)
            for (int level = 1; level <= 3; ++level) {
                const DistortionSpec spec{k, level, derive_seed(base_seed, stem, k, level)};
                const Video out = apply(frames, spec, ppd, display, config);
                const std::string name = stem + "_" + kind_name(k) + "_" + std::to_string(level);
                std::string file;
                if (image) {
                    file = name + ".png";
                    io::write_png((fs::path(out_dir) / file).string(), out[0], 16);
                } else if (ext == ".y4m") {
                    file = name + ".y4m";
                    io::Y4mWriter w((fs::path(out_dir) / file).string(), info.width, info.height, info.fps);
                    for (const auto& fr : out) w.write(fr);
                } else {
                    file = name + ".rgb";
                    io::RawFormat fmt;
                    fmt.width = info.width;
                    fmt.height = info.height;
                    fmt.fps = info.fps;
                    fmt.rgb = true;
                    fmt.bit_depth = 16;
                    io::RawWriter w((fs::path(out_dir) / file).string(), fmt);
                    for (const auto& fr : out) w.write(fr);
                }
                rows.push_back({file, ref, k, level, spec.seed});
            }
    }
    std::ofstream m(fs::path(out_dir) / "manifest.csv");
    if (!m) throw Error("cannot write manifest in " + out_dir);
    m << "file,reference,kind,level,seed\n";
    for (const auto& r : rows) m << r.file << ',' << r.reference << ',' << kind_name(r.kind) << ',' << r.level << ',' << r.seed << '\n';
    return rows;
}

}  // namespace cvvdp::distort
