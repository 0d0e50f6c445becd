#pragma once

#include <array>
#include <deque>
#include <memory>
#include <vector>

#include "cvvdp/channels.hpp"
#include "cvvdp/csf.hpp"
#include "cvvdp/image.hpp"

namespace cvvdp::temporal {

// Below this rate the transient channel is dropped.
inline constexpr double kMinTransientFps = 10.0;

// One plane per visual channel; the transient plane is empty when the
// channel is not modelled.
using ChannelFrame = std::array<Plane, kNumChannels>;

struct TemporalFilterBank {
    double fps = 0.0;
    int taps = 1;
    bool has_transient = false;
    // Indexed by VisualChannel, centred, length taps.
    std::array<std::vector<double>, kNumChannels> kernels;

    static TemporalFilterBank design(double fps, const csf::CastleCsfParams& params = {});

    double dc_gain(VisualChannel ch) const;
    // Magnitude of the kernel's frequency response at omega Hz.
    double response(VisualChannel ch, double omega) const;
};

// Frequency response the kernels are designed from.
double channel_response(const csf::CastleCsfParams& params, VisualChannel ch, double omega);

// Streaming split of DKL frames into visual channels. Frames beyond both
// ends are replicated from the first/last frame.
class TemporalSplitter {
public:
    explicit TemporalSplitter(const TemporalFilterBank& bank);

    void push(Frame dkl);
    // No more input; remaining frames become available.
    void finish();
    bool ready() const;
    ChannelFrame pop();

    int frames_in() const { return in_; }
    std::size_t buffered() const { return buffer_.size(); }

private:
    const Frame& frame(int i) const;

    const TemporalFilterBank& bank_;
    int half_;
    std::deque<Frame> buffer_;
    int base_ = 0;  // index of buffer_.front()
    int in_ = 0;
    int out_ = 0;
    bool finished_ = false;
};

// Whole-video convenience wrapper.
std::vector<ChannelFrame> split_channels(const std::vector<Frame>& dkl, const TemporalFilterBank& bank);

// Single image: no temporal filtering and no transient channel.
ChannelFrame image_channels(const Frame& dkl);

}  // namespace cvvdp::temporal
