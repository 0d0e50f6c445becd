#include "cvvdp/pooling.hpp"

#include <cmath>

#include "cvvdp/error.hpp"

namespace cvvdp::pooling {

namespace {

double pnorm_term(double x, double beta) { return beta == 2.0 ? x * x : std::pow(std::abs(x), beta); }

}  // namespace

double band_feature(const Plane& D, double beta_x) {
    if (D.empty()) return 0.0;
    double s = 0.0;
    if (beta_x == 2.0) {
        for (float v : D.data) s += static_cast<double>(v) * v;
    } else {
        for (float v : D.data) s += std::pow(std::abs(static_cast<double>(v)), beta_x);
    }
    return std::pow(s / static_cast<double>(D.size()), 1.0 / beta_x);
}

double band_feature(const std::vector<double>& values, double beta_x) {
    if (values.empty()) return 0.0;
    double s = 0.0;
    for (double v : values) s += pnorm_term(v, beta_x);
    return std::pow(s / static_cast<double>(values.size()), 1.0 / beta_x);
}

double frame_quality(const FrameFeatures& f, const std::array<bool, kNumChannels>& active, const MetricParams& p) {
    double sc = 0.0;
    for (int c = 0; c < kNumChannels; ++c) {
        if (!active[c]) continue;
        double sb = 0.0;
        for (double v : f[c]) sb += pnorm_term(v, p.beta_b);
        const double norm_b = std::pow(sb, 1.0 / p.beta_b);
        sc += pnorm_term(p.w[c] * norm_b, p.beta_c);
    }
    return std::pow(sc, 1.0 / p.beta_c);
}

void FramePooler::add(double q) {
    sum_ += pnorm_term(q, beta_f_);
    ++frames_;
}

double FramePooler::pooled() const {
    if (frames_ == 0) return 0.0;
    return std::pow(sum_ / frames_, 1.0 / beta_f_);
}

double pool_video(const PooledFeatures& features, const MetricParams& p) {
    FramePooler pooler(p);
    for (const auto& f : features.frames) pooler.add(frame_quality(f, features.active, p));
    return pooler.pooled();
}

double pool_image(const PooledFeatures& features, const MetricParams& p) {
    if (features.frames.size() != 1) throw Error("image pooling needs exactly one frame");
    if (features.active[index(VisualChannel::ach_trans)])
        throw Error("image pooling expects no transient channel");
    return p.k_i * frame_quality(features.frames[0], features.active, p);
}

QualityScore jod_regress(double d_pooled, const MetricParams& p) {
    if (!(d_pooled >= 0.0)) throw NumericalError("pooled difference is negative or NaN");
    QualityScore q;
    q.d_pooled = d_pooled;
    q.jod = d_pooled == 0.0 ? 10.0 : 10.0 - p.alpha_jod * std::pow(d_pooled, p.beta_jod);
    return q;
}

}  // namespace cvvdp::pooling
