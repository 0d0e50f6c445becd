#pragma once

#include <array>
#include <vector>

#include "cvvdp/channels.hpp"
#include "cvvdp/image.hpp"
#include "cvvdp/params.hpp"

namespace cvvdp::pooling {

// Per-channel, per-band pooled values of one frame: [c][b].
using FrameFeatures = std::array<std::vector<double>, kNumChannels>;

struct PooledFeatures {
    int bands = 0;
    std::vector<double> band_frequencies;  // cpd; last entry is the base band
    std::array<bool, kNumChannels> active{true, true, true, true};
    std::vector<FrameFeatures> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
    double at(int f, VisualChannel c, int b) const { return frames[f][index(c)][b]; }
};

struct QualityScore {
    double jod = 10.0;
    double d_pooled = 0.0;
};

// (sum |D|^beta_x / N)^(1/beta_x), accumulated in double.
double band_feature(const Plane& D, double beta_x);
double band_feature(const std::vector<double>& values, double beta_x);

// || w_c || f_{c,b} ||_{beta_b,b} ||_{beta_c,c}
double frame_quality(const FrameFeatures& f, const std::array<bool, kNumChannels>& active, const MetricParams& p);

// Running sum over frames of Q_f^beta_f.
class FramePooler {
public:
    explicit FramePooler(const MetricParams& p) : beta_f_(p.beta_f) {}
    void add(double q);
    int frames() const { return frames_; }
    double pooled() const;

private:
    double beta_f_;
    double sum_ = 0.0;
    int frames_ = 0;
};

double pool_video(const PooledFeatures& features, const MetricParams& p);
double pool_image(const PooledFeatures& features, const MetricParams& p);

QualityScore jod_regress(double d_pooled, const MetricParams& p);

}  // namespace cvvdp::pooling
