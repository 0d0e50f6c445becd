#include "cvvdp/masking.hpp"

#include <algorithm>
#include <cmath>

#include "cvvdp/error.hpp"
#include "fastmath.hpp"

namespace cvvdp::masking {

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

inline float powf_pos(float x, float y) { return fastmath::pow_pos(x, y); }

}  // namespace

double encode_mult(double C, double S, VisualChannel c, const MetricParams& p) {
    return C * p.s_corr * p.s_ch[index(c)] * S;
}

double encode_add(double C, double S, VisualChannel c, const MetricParams& p) {
    const double s = p.s_corr * S;
    return sgn(C) * std::max(p.additive_gain * p.additive_m[index(c)] * (std::abs(C) - 1.0 / s) + 1.0, 0.0);
}

double encode(double C, double S, VisualChannel c, const MetricParams& p) {
    return p.encoding == ContrastEncoding::multiplicative ? encode_mult(C, S, c, p) : encode_add(C, S, c, p);
}

double soft_clamp(double D, double k_c) { return k_c * D / (k_c + D); }

double baseband_difference(double g_test, double g_ref, double S, VisualChannel c, const MetricParams& p) {
    return p.k_b[index(c)] * std::abs(g_test - g_ref) * S;
}

double mutual_difference(double t, double r, VisualChannel c, const MetricParams& p, double cross_mask) {
    const int ci = index(c);
    const double mm = std::min(std::abs(t), std::abs(r));
    const double mask = p.xcm[ci][ci] * std::pow(mm, p.q[ci]) + cross_mask;
    return std::pow(std::abs(t - r), p.p) / (1.0 + mask);
}

double transducer(double x, VisualChannel, const MetricParams& p, double mask) {
    return p.transducer_gain * sgn(x) * std::pow(std::abs(x), p.p) / (p.transducer_offset + mask);
}

double transducer_difference(double t, double r, VisualChannel c, const MetricParams& p) {
    const int ci = index(c);
    const double k = p.xcm[ci][ci];
    return std::abs(transducer(t, c, p, k * std::pow(std::abs(t), p.q[ci])) -
                    transducer(r, c, p, k * std::pow(std::abs(r), p.q[ci])));
}

double similarity_difference(double t, double r, VisualChannel c, const MetricParams& p) {
    const int ci = index(c);
    const double k = p.xcm[ci][ci];
    const double eps = p.similarity_dmax - 1.0;
    const double tr = k * std::abs(t) * std::abs(r), tt = k * t * t, rr = k * r * r;
    return p.similarity_dmax * (1.0 - (2.0 * tr + eps) / (tt + rr + eps));
}

double pointwise_difference(double t, double r, VisualChannel c, const MetricParams& p) {
    switch (p.masking) {
        case MaskingModel::mutual: return mutual_difference(t, r, c, p);
        case MaskingModel::transducer: return transducer_difference(t, r, c, p);
        case MaskingModel::similarity: return similarity_difference(t, r, c, p);
    }
    return 0.0;
}

std::vector<float> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<float> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) sum += std::exp(-0.5 * i * i / (sigma * sigma));
    for (int i = -radius; i <= radius; ++i)
        k[i + radius] = static_cast<float>(std::exp(-0.5 * i * i / (sigma * sigma)) / sum);
    return k;
}

void gaussian_blur(Plane& plane, double sigma) {
    if (!(sigma > 0.0) || plane.empty()) return;
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(k.size() / 2);
    const int w = plane.width, h = plane.height;
    const float k0 = k[r];

    // Horizontal pass through a padded row buffer; symmetric taps paired.
    std::vector<float> pad(w + 2 * r);
    Plane tmp(w, h);
    for (int y = 0; y < h; ++y) {
        const float* src = plane.row(y);
        for (int i = 0; i < r; ++i) {
            pad[i] = src[0];
            pad[w + r + i] = src[w - 1];
        }
        std::copy(src, src + w, pad.begin() + r);
        float* __restrict dst = tmp.row(y);
        const float* __restrict c = pad.data() + r;
        for (int x = 0; x < w; ++x) dst[x] = k0 * c[x];
        for (int j = 1; j <= r; ++j) {
            const float kj = k[r + j];
            for (int x = 0; x < w; ++x) dst[x] += kj * (c[x - j] + c[x + j]);
        }
    }
    // Vertical pass accumulating whole rows.
    for (int y = 0; y < h; ++y) {
        float* __restrict dst = plane.row(y);
        const float* __restrict c = tmp.row(y);
        for (int x = 0; x < w; ++x) dst[x] = k0 * c[x];
        for (int j = 1; j <= r; ++j) {
            const float kj = k[r + j];
            const float* __restrict up = tmp.row(std::max(y - j, 0));
            const float* __restrict dn = tmp.row(std::min(y + j, h - 1));
            for (int x = 0; x < w; ++x) dst[x] += kj * (up[x] + dn[x]);
        }
    }
}

void encode_plane(Plane& C, const Plane& S, VisualChannel c, const MetricParams& p) {
    const std::size_t n = C.size();
    float* x = C.data.data();
    const float* s = S.data.data();
    if (p.encoding == ContrastEncoding::multiplicative) {
        const float f = static_cast<float>(p.s_corr * p.s_ch[index(c)]);
        for (std::size_t i = 0; i < n; ++i) x[i] *= f * s[i];
    } else {
        const float g = static_cast<float>(p.additive_gain * p.additive_m[index(c)]);
        const float sc = static_cast<float>(p.s_corr);
        for (std::size_t i = 0; i < n; ++i) {
            const float v = x[i];
            const float m = std::max(g * (std::abs(v) - 1.0f / (sc * s[i])) + 1.0f, 0.0f);
            x[i] = v > 0.0f ? m : (v < 0.0f ? -m : 0.0f);
        }
    }
}

namespace {

// sum_i k_ic (X_i^q ∗ g), with the blur applied once to the weighted sum.
Plane pooled_mask(const BandPlanes& x, int c, const MetricParams& p, double q) {
    const Plane* first = nullptr;
    for (const auto& pl : x)
        if (!pl.empty()) first = &pl;
    Plane m(first->width, first->height);
    const float qf = static_cast<float>(q);
    for (int i = 0; i < kNumChannels; ++i) {
        const double k = p.xcm[i][c];
        if (k == 0.0 || x[i].empty()) continue;
        const float kf = static_cast<float>(k);
        const float* src = x[i].data.data();
        float* dst = m.data.data();
        if (q == 1.0)
            for (std::size_t j = 0; j < m.size(); ++j) dst[j] += kf * src[j];
        else
            for (std::size_t j = 0; j < m.size(); ++j) dst[j] += kf * powf_pos(src[j], qf);
    }
    gaussian_blur(m, p.sigma_sp);
    return m;
}

BandPlanes abs_planes(const BandPlanes& x) {
    BandPlanes out;
    for (int c = 0; c < kNumChannels; ++c) {
        if (x[c].empty()) continue;
        out[c] = x[c];
        for (auto& v : out[c].data) v = std::abs(v);
    }
    return out;
}

}  // namespace

BandPlanes band_difference(const BandPlanes& test, const BandPlanes& ref, const MetricParams& p) {
    BandPlanes D;
    const float pe = static_cast<float>(p.p);
    switch (p.masking) {
        case MaskingModel::mutual: {
            BandPlanes mm;
            for (int c = 0; c < kNumChannels; ++c) {
                if (test[c].empty()) continue;
                mm[c] = Plane(test[c].width, test[c].height);
                for (std::size_t j = 0; j < mm[c].size(); ++j)
                    mm[c].data[j] = std::min(std::abs(test[c].data[j]), std::abs(ref[c].data[j]));
            }
            for (int c = 0; c < kNumChannels; ++c) {
                if (test[c].empty()) continue;
                Plane mask = pooled_mask(mm, c, p, p.q[c]);
                D[c] = std::move(mask);
                float* d = D[c].data.data();
                const float* t = test[c].data.data();
                const float* r = ref[c].data.data();
                for (std::size_t j = 0; j < D[c].size(); ++j) d[j] = powf_pos(std::abs(t[j] - r[j]), pe) / (1.0f + d[j]);
            }
            break;
        }
        case MaskingModel::transducer: {
            const BandPlanes at = abs_planes(test), ar = abs_planes(ref);
            const float g = static_cast<float>(p.transducer_gain);
            const float off = static_cast<float>(p.transducer_offset);
            for (int c = 0; c < kNumChannels; ++c) {
                if (test[c].empty()) continue;
                const Plane mt = pooled_mask(at, c, p, p.q[c]);
                const Plane mr = pooled_mask(ar, c, p, p.q[c]);
                D[c] = Plane(test[c].width, test[c].height);
                for (std::size_t j = 0; j < D[c].size(); ++j) {
                    const float t = test[c].data[j], r = ref[c].data[j];
                    const float tt = g * std::copysign(powf_pos(std::abs(t), pe), t) / (off + mt.data[j]);
                    const float tr = g * std::copysign(powf_pos(std::abs(r), pe), r) / (off + mr.data[j]);
                    D[c].data[j] = std::abs(tt - tr);
                }
            }
            break;
        }
        case MaskingModel::similarity: {
            const float dmax = static_cast<float>(p.similarity_dmax);
            const float eps = dmax - 1.0f;
            BandPlanes tr, tt, rr;
            for (int c = 0; c < kNumChannels; ++c) {
                if (test[c].empty()) continue;
                tr[c] = tt[c] = rr[c] = Plane(test[c].width, test[c].height);
                for (std::size_t j = 0; j < test[c].size(); ++j) {
                    const float t = std::abs(test[c].data[j]), r = std::abs(ref[c].data[j]);
                    tr[c].data[j] = t * r;
                    tt[c].data[j] = t * t;
                    rr[c].data[j] = r * r;
                }
            }
            for (int c = 0; c < kNumChannels; ++c) {
                if (test[c].empty()) continue;
                const Plane ptr = pooled_mask(tr, c, p, 1.0);
                const Plane ptt = pooled_mask(tt, c, p, 1.0);
                const Plane prr = pooled_mask(rr, c, p, 1.0);
                D[c] = Plane(test[c].width, test[c].height);
                for (std::size_t j = 0; j < D[c].size(); ++j) {
                    const float ratio = (2.0f * ptr.data[j] + eps) / (ptt.data[j] + prr.data[j] + eps);
                    D[c].data[j] = std::max(dmax * (1.0f - ratio), 0.0f);
                }
            }
            break;
        }
    }
    return D;
}

void soft_clamp_plane(Plane& D, double k_c) {
    const float k = static_cast<float>(k_c);
    for (auto& v : D.data) v = k * v / (k + v);
}

}  // namespace cvvdp::masking
