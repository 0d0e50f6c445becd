#include "cvvdp/pyramid.hpp"

#include <algorithm>
#include <cmath>

#include "cvvdp/error.hpp"

namespace cvvdp::pyramid {

namespace {

constexpr float k0 = 1.0f / 16.0f, k1 = 4.0f / 16.0f, k2 = 6.0f / 16.0f;

// Horizontal 5-tap filter keeping even columns.
void reduce_row(const float* x, int w, float* out, int ow) {
    auto at = [&](int i) { return x[std::clamp(i, 0, w - 1)]; };
    int i = 0;
    for (; i < ow && 2 * i - 2 < 0; ++i)
        out[i] = k0 * (at(2 * i - 2) + at(2 * i + 2)) + k1 * (at(2 * i - 1) + at(2 * i + 1)) + k2 * at(2 * i);
    for (; i < ow && 2 * i + 2 < w; ++i) {
        const float* p = x + 2 * i;
        out[i] = k0 * (p[-2] + p[2]) + k1 * (p[-1] + p[1]) + k2 * p[0];
    }
    for (; i < ow; ++i)
        out[i] = k0 * (at(2 * i - 2) + at(2 * i + 2)) + k1 * (at(2 * i - 1) + at(2 * i + 1)) + k2 * at(2 * i);
}

// Polyphase expand of one line: even outputs (1,6,1)/8, odd (1,1)/2.
void expand_row(const float* y, int m, float* out, int w) {
    auto at = [&](int i) { return y[std::clamp(i, 0, m - 1)]; };
    for (int x = 0; x < w; ++x) {
        const int i = x >> 1;
        if ((x & 1) == 0) {
            if (i >= 1 && i + 1 < m)
                out[x] = 0.125f * (y[i - 1] + y[i + 1]) + 0.75f * y[i];
            else
                out[x] = 0.125f * (at(i - 1) + at(i + 1)) + 0.75f * at(i);
        } else {
            out[x] = 0.5f * (at(i) + at(i + 1));
        }
    }
}

}  // namespace

Plane reduce(const Plane& in) {
    const int w = in.width, h = in.height;
    const int ow = (w + 1) / 2, oh = (h + 1) / 2;
    Plane tmp(ow, h);
    for (int y = 0; y < h; ++y) reduce_row(in.row(y), w, tmp.row(y), ow);
    Plane out(ow, oh);
    auto r = [&](int y) { return tmp.row(std::clamp(y, 0, h - 1)); };
    for (int j = 0; j < oh; ++j) {
        const float* a = r(2 * j - 2);
        const float* b = r(2 * j - 1);
        const float* c = r(2 * j);
        const float* d = r(2 * j + 1);
        const float* e = r(2 * j + 2);
        float* o = out.row(j);
        for (int i = 0; i < ow; ++i) o[i] = k0 * (a[i] + e[i]) + k1 * (b[i] + d[i]) + k2 * c[i];
    }
    return out;
}

Plane expand(const Plane& in, int width, int height) {
    const int m = in.width, mh = in.height;
    Plane tmp(width, mh);
    for (int y = 0; y < mh; ++y) expand_row(in.row(y), m, tmp.row(y), width);
    Plane out(width, height);
    auto r = [&](int y) { return tmp.row(std::clamp(y, 0, mh - 1)); };
    for (int y = 0; y < height; ++y) {
        const int i = y >> 1;
        float* o = out.row(y);
        if ((y & 1) == 0) {
            const float* a = r(i - 1);
            const float* b = r(i);
            const float* c = r(i + 1);
            for (int x = 0; x < width; ++x) o[x] = 0.125f * (a[x] + c[x]) + 0.75f * b[x];
        } else {
            const float* a = r(i);
            const float* b = r(i + 1);
            for (int x = 0; x < width; ++x) o[x] = 0.5f * (a[x] + b[x]);
        }
    }
    return out;
}

int band_count(int width, int height, double ppd) {
    if (width < 8 || height < 8) throw DomainError("pyramid needs frames of at least 8x8 pixels");
    if (!(ppd > 0.0)) throw DomainError("pyramid needs ppd > 0");
    const int max_levels = std::max(2, static_cast<int>(std::floor(std::log2(std::min(width, height)))) - 1);
    // Grow while the new lowest band-pass band stays above the limit.
    int n = 2;
    while (n < max_levels && kBandPeakFactor * ppd / std::exp2(n - 1) > kMinBandFrequency) ++n;
    return n;
}

std::vector<double> band_frequencies(int bands, double ppd) {
    std::vector<double> rho(bands);
    rho[0] = ppd / 2.0;
    for (int b = 1; b < bands; ++b) rho[b] = kBandPeakFactor * ppd / std::exp2(b);
    return rho;
}

BandKind band_kind(int band, int bands) {
    if (band == bands - 1) return BandKind::base;
    if (band == 0) return BandKind::high_pass;
    return BandKind::band_pass;
}

LaplacianPyramid decompose(const Plane& in, int bands, bool keep_background) {
    if (bands < 1) throw DomainError("pyramid needs at least one band");
    LaplacianPyramid p;
    p.bands.reserve(bands);
    if (keep_background) p.background.reserve(bands);
    Plane g = in;
    for (int b = 0; b < bands - 1; ++b) {
        Plane next = reduce(g);
        Plane up = expand(next, g.width, g.height);
        for (std::size_t i = 0; i < g.size(); ++i) g.data[i] -= up.data[i];
        p.bands.push_back(std::move(g));
        if (keep_background) p.background.push_back(std::move(up));
        g = std::move(next);
    }
    if (keep_background) p.background.push_back(g);
    p.bands.push_back(std::move(g));
    return p;
}

Plane LaplacianPyramid::reconstruct() const {
    Plane acc = bands.back();
    for (int b = size() - 2; b >= 0; --b) {
        Plane up = expand(acc, bands[b].width, bands[b].height);
        for (std::size_t i = 0; i < up.size(); ++i) up.data[i] += bands[b].data[i];
        acc = std::move(up);
    }
    return acc;
}

Plane band_contrast(const Plane& band, const Plane& background, BandKind kind, double min_background) {
    Plane out(band.width, band.height);
    const float gain = kind == BandKind::band_pass ? 2.0f : 1.0f;
    const float lmin = static_cast<float>(min_background);
    for (std::size_t i = 0; i < band.size(); ++i)
        out.data[i] = gain * band.data[i] / std::max(background.data[i], lmin);
    return out;
}

}  // namespace cvvdp::pyramid
