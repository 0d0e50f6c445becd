#include "cvvdp/content.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "cvvdp/error.hpp"

namespace cvvdp::content {

namespace {

double hash01(std::uint64_t seed, std::int64_t x, std::int64_t y) {
    std::uint64_t h = seed ^ (static_cast<std::uint64_t>(x) * 0x9e3779b97f4a7c15ull) ^
                      (static_cast<std::uint64_t>(y) * 0xc2b2ae3d27d4eb4full);
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ull;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebull;
    h ^= h >> 31;
    return (h >> 11) * 0x1.0p-53;
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise on a lattice of the given cell size, in [-1, 1].
double value_noise(std::uint64_t seed, double x, double y, double cell) {
    const double gx = x / cell, gy = y / cell;
    const double fx = std::floor(gx), fy = std::floor(gy);
    const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
    const double tx = smooth(gx - fx), ty = smooth(gy - fy);
    const double a = hash01(seed, ix, iy), b = hash01(seed, ix + 1, iy);
    const double c = hash01(seed, ix, iy + 1), d = hash01(seed, ix + 1, iy + 1);
    const double v = (a + tx * (b - a)) + ty * ((c + tx * (d - c)) - (a + tx * (b - a)));
    return 2.0 * v - 1.0;
}

Frame from_planes(const Plane& r, const Plane& g, const Plane& b) {
    Frame f;
    f.c = {r, g, b};
    for (auto& pl : f.c)
        for (auto& v : pl.data) v = std::clamp(v, 0.0f, 1.0f);
    return f;
}

// Luminance-like base plus two chroma modulations mapped to RGB.
// Near-equal contrast per octave, as in natural-image spectra.
Frame colour_texture(int w, int h, std::uint64_t seed, double ox, double oy, double lum_gain, double chroma_gain) {
    const Plane L = fractal_noise(w, h, seed, 0.2, 256, ox, oy);
    const Plane A = fractal_noise(w, h, seed + 101, 1.3, 256, ox, oy);
    const Plane B = fractal_noise(w, h, seed + 202, 1.3, 256, ox, oy);
    Plane r(w, h), g(w, h), b(w, h);
    for (std::size_t i = 0; i < L.size(); ++i) {
        // Scaled so the darkest areas reach black, as in most photographs.
        const float y = 0.45f + 1.8f * static_cast<float>(lum_gain) * L.data[i];
        const float a = static_cast<float>(chroma_gain) * A.data[i], bb = static_cast<float>(chroma_gain) * B.data[i];
        r.data[i] = y + a;
        g.data[i] = y - 0.5f * a + 0.3f * bb;
        b.data[i] = y - bb;
    }
    return from_planes(r, g, b);
}

}  // namespace

Plane fractal_noise(int width, int height, std::uint64_t seed, double slope, int base_cell, double offset_x,
                    double offset_y) {
    Plane p(width, height);
    double norm = 0.0;
    std::vector<double> amps;
    for (double cell = base_cell, amp = 1.0; cell >= 1.0; cell /= 2.0, amp *= std::exp2(-slope)) {
        amps.push_back(amp);
        norm += amp;
    }
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            double s = 0.0, cell = base_cell;
            for (std::size_t o = 0; o < amps.size(); ++o, cell /= 2.0)
                s += amps[o] * value_noise(seed + 7919 * o, x + offset_x, y + offset_y, cell);
            p.at(x, y) = static_cast<float>(s / norm);
        }
    return p;
}

Frame synth_image(ImageKind kind, int w, int h, std::uint64_t seed) {
    if (w < 8 || h < 8) throw DomainError("content needs at least 8x8 pixels");
    switch (kind) {
        case ImageKind::landscape: {
            Frame f = colour_texture(w, h, seed, 0.0, 0.0, 0.6, 0.25);
            // Bright sky band with a soft horizon.
            for (int y = 0; y < h; ++y) {
                const float t = std::clamp(static_cast<float>(y) / h * 3.0f - 0.6f, 0.0f, 1.0f);
                const float sky[3] = {0.55f, 0.7f, 0.95f};
                for (int c = 0; c < 3; ++c)
                    for (int x = 0; x < w; ++x) f[c].at(x, y) = (1.0f - t) * sky[c] + t * f[c].at(x, y);
            }
            return f;
        }
        case ImageKind::shapes: {
            Frame f(w, h);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    f[0].at(x, y) = 0.2f + 0.5f * x / w;
                    f[1].at(x, y) = 0.25f + 0.4f * y / h;
                    f[2].at(x, y) = 0.6f - 0.3f * x / w;
                }
            std::mt19937_64 rng(seed);
            std::uniform_real_distribution<double> u(0.0, 1.0);
            const Plane grain = fractal_noise(w, h, seed + 9, 0.3, 16);
            for (int k = 0; k < 14; ++k) {
                const double cx = u(rng) * w, cy = u(rng) * h, rad = (0.04 + 0.12 * u(rng)) * std::min(w, h);
                const float col[3] = {static_cast<float>(u(rng)), static_cast<float>(u(rng)), static_cast<float>(u(rng))};
                const bool disc = k % 2 == 0;
                for (int y = std::max(0, static_cast<int>(cy - rad)); y < std::min(h, static_cast<int>(cy + rad) + 1); ++y)
                    for (int x = std::max(0, static_cast<int>(cx - rad)); x < std::min(w, static_cast<int>(cx + rad) + 1); ++x) {
                        const bool inside = disc ? std::hypot(x - cx, y - cy) <= rad : true;
                        if (inside)
                            for (int c = 0; c < 3; ++c) f[c].at(x, y) = col[c];
                    }
            }
            for (auto& pl : f.c)
                for (std::size_t i = 0; i < pl.size(); ++i) pl.data[i] = std::clamp(pl.data[i] + 0.08f * grain.data[i], 0.0f, 1.0f);
            return f;
        }
        case ImageKind::texture: {
            Frame f = colour_texture(w, h, seed, 0.0, 0.0, 0.3, 0.1);
            const Plane fine = fractal_noise(w, h, seed + 5, 0.2, 8);
            for (int y = 0; y < h; ++y)
                for (int x = 0; x < w; ++x) {
                    const double g1 = std::sin(2.0 * std::numbers::pi * (x * 0.11 + y * 0.04));
                    const double g2 = (x / 6 + y / 6) % 2 == 0 ? 1.0 : -1.0;
                    const double m = x < w / 2 ? 0.18 * g1 : 0.12 * g2;
                    for (int c = 0; c < 3; ++c)
                        f[c].at(x, y) = std::clamp(f[c].at(x, y) + static_cast<float>(m + 0.12 * fine.at(x, y)), 0.0f, 1.0f);
                }
            return f;
        }
    }
    return Frame(w, h);
}

Video synth_video(VideoKind kind, int w, int h, int frames, std::uint64_t seed) {
    if (frames < 1) throw DomainError("video needs at least one frame");
    Video v;
    v.reserve(frames);
    switch (kind) {
        case VideoKind::pan:
            for (int f = 0; f < frames; ++f) v.push_back(colour_texture(w, h, seed, 2.0 * f, 0.5 * f, 0.55, 0.2));
            break;
        case VideoKind::motion: {
            const Frame bg = synth_image(ImageKind::shapes, w, h, seed);
            for (int f = 0; f < frames; ++f) {
                Frame fr = bg;
                // A textured disc moving across the frame with slowly varying brightness.
                const double cx = w * (0.2 + 0.6 * f / std::max(1, frames - 1)), cy = h * 0.5, rad = 0.18 * std::min(w, h);
                const float gain = 1.0f + 0.05f * static_cast<float>(std::sin(2.0 * std::numbers::pi * f / 12.0));
                for (int y = 0; y < h; ++y)
                    for (int x = 0; x < w; ++x) {
                        for (int c = 0; c < 3; ++c) fr[c].at(x, y) = std::clamp(fr[c].at(x, y) * gain, 0.0f, 1.0f);
                        const double d = std::hypot(x - cx, y - cy);
                        if (d < rad) {
                            const float s = 0.5f + 0.3f * static_cast<float>(std::sin((x - cx) * 0.5) * std::cos((y - cy) * 0.5));
                            fr[0].at(x, y) = s;
                            fr[1].at(x, y) = 0.8f * s;
                            fr[2].at(x, y) = 0.3f;
                        }
                    }
                v.push_back(std::move(fr));
            }
            break;
        }
    }
    return v;
}

ImageKind parse_image_kind(const std::string& s) {
    if (s == "landscape") return ImageKind::landscape;
    if (s == "shapes") return ImageKind::shapes;
    if (s == "texture") return ImageKind::texture;
    throw ConfigError("unknown image content '" + s + "' (landscape, shapes, texture)");
}

VideoKind parse_video_kind(const std::string& s) {
    if (s == "pan") return VideoKind::pan;
    if (s == "motion") return VideoKind::motion;
    throw ConfigError("unknown video content '" + s + "' (pan, motion)");
}

}  // namespace cvvdp::content
