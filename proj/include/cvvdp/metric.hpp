#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>

#include "cvvdp/csf.hpp"
#include "cvvdp/display.hpp"
#include "cvvdp/params.hpp"
#include "cvvdp/pooling.hpp"
#include "cvvdp/source.hpp"
#include "cvvdp/temporal.hpp"

namespace cvvdp {

// Called once per output frame with the encoded test frame and the per-pixel
// JOD map at the same resolution.
using HeatmapSink = std::function<void(int frame, const Frame& test, const Plane& jod_map)>;

struct EvalOptions {
    HeatmapSink heatmap;
    int threads = 0;  // 0: hardware concurrency
};

struct MetricResult {
    pooling::QualityScore score;
    pooling::PooledFeatures features;
    bool image_mode = false;
    double ppd = 0.0;
    double fps = 0.0;
    int width = 0;
    int height = 0;
    int frames = 0;
    std::size_t clamped_test = 0;  // input values outside [0,1]
    std::size_t clamped_ref = 0;
};

struct FrameDifference {
    pooling::FrameFeatures features;
    // Channel-pooled difference at pixel resolution; only when requested.
    Plane distortion;
};

class Metric {
public:
    explicit Metric(display::DisplaySpec display, MetricParams params = {}, csf::CastleCsfParams csf_params = {},
                    std::shared_ptr<const csf::CsfLut> lut = nullptr);

    const display::DisplaySpec& display() const { return display_; }
    const MetricParams& params() const { return params_; }
    const csf::CastleCsfParams& csf_params() const { return csf_params_; }
    const csf::CsfLut& lut() const { return *lut_; }
    double ppd() const { return ppd_; }

    // Encoded (or absolute linear) RGB -> DKL in cd/m^2.
    Frame to_dkl(const Frame& input, display::InputEncoding encoding = display::InputEncoding::display_encoded,
                 std::size_t* clamped = nullptr) const;

    FrameDifference frame_difference(const temporal::ChannelFrame& test, const temporal::ChannelFrame& ref,
                                     bool want_map = false, int threads = 1) const;

    MetricResult evaluate(FrameSource& test, FrameSource& ref, const EvalOptions& options = {}) const;
    MetricResult evaluate(const Frame& test, const Frame& ref, const EvalOptions& options = {}) const;
    MetricResult evaluate(const Video& test, const Video& ref, double fps, const EvalOptions& options = {}) const;

private:
    display::DisplaySpec display_;
    MetricParams params_;
    csf::CastleCsfParams csf_params_;
    std::shared_ptr<const csf::CsfLut> lut_;
    Mat3 rgb_to_dkl_;
    double ppd_;
};

// Per-pixel JOD from a channel-pooled difference map.
Plane distortion_to_jod(const Plane& distortion, const MetricParams& p);

}  // namespace cvvdp
