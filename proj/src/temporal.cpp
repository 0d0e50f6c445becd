#include "cvvdp/temporal.hpp"

#include <cmath>
#include <numbers>

#include "cvvdp/error.hpp"

namespace cvvdp::temporal {

double channel_response(const csf::CastleCsfParams& p, VisualChannel ch, double omega) {
    switch (ch) {
        case VisualChannel::ach_sust: return csf::sustained_response(omega, p.ach.beta_S, p.ach.sigma_S);
        case VisualChannel::ach_trans:
            return csf::transient_response(omega, p.ach.beta_T, p.ach.sigma_T, p.ach.omega0);
        case VisualChannel::rg: return csf::sustained_response(omega, p.rg.beta_S, p.rg.sigma_S);
        case VisualChannel::yv: return csf::sustained_response(omega, p.yv.beta_S, p.yv.sigma_S);
    }
    return 0.0;
}

TemporalFilterBank TemporalFilterBank::design(double fps, const csf::CastleCsfParams& params) {
    if (!(fps > 0.0) || !std::isfinite(fps)) throw ConfigError("frame rate must be positive");
    TemporalFilterBank bank;
    bank.fps = fps;
    int n = static_cast<int>(std::ceil(0.25 * fps - 1e-9));
    if (n % 2 == 0) ++n;
    n = std::max(n, 1);
    bank.taps = n;
    bank.has_transient = fps >= kMinTransientFps;
    const int half = n / 2;
    for (int c = 0; c < kNumChannels; ++c) {
        const auto ch = static_cast<VisualChannel>(c);
        if (ch == VisualChannel::ach_trans && !bank.has_transient) continue;
        // Inverse real DFT of the symmetric spectrum sampled at k*fps/n.
        std::vector<double> spec(half + 1);
        for (int k = 0; k <= half; ++k) spec[k] = channel_response(params, ch, k * fps / n);
        std::vector<double> h(n);
        for (int t = -half; t <= half; ++t) {
            double s = spec[0];
            for (int k = 1; k <= half; ++k) s += 2.0 * spec[k] * std::cos(2.0 * std::numbers::pi * k * t / n);
            h[t + half] = s / n;
        }
        if (ch != VisualChannel::ach_trans) {
            double sum = 0.0;
            for (double v : h) sum += v;
            for (double& v : h) v /= sum;
        }
        bank.kernels[c] = std::move(h);
    }
    return bank;
}

double TemporalFilterBank::dc_gain(VisualChannel ch) const {
    double s = 0.0;
    for (double v : kernels[index(ch)]) s += v;
    return s;
}

double TemporalFilterBank::response(VisualChannel ch, double omega) const {
    const auto& h = kernels[index(ch)];
    const int half = static_cast<int>(h.size()) / 2;
    double re = 0.0;
    for (int t = -half; t <= half; ++t) re += h[t + half] * std::cos(2.0 * std::numbers::pi * omega * t / fps);
    return std::abs(re);
}

TemporalSplitter::TemporalSplitter(const TemporalFilterBank& bank) : bank_(bank), half_(bank.taps / 2) {}

void TemporalSplitter::push(Frame dkl) {
    if (finished_) throw Error("temporal splitter: push after finish");
    if (!buffer_.empty() && (dkl.width() != buffer_.front().width() || dkl.height() != buffer_.front().height()))
        throw PairingError("frame size changed mid-stream");
    buffer_.push_back(std::move(dkl));
    ++in_;
}

void TemporalSplitter::finish() { finished_ = true; }

bool TemporalSplitter::ready() const {
    if (out_ >= in_) return false;
    return finished_ || in_ > out_ + half_;
}

const Frame& TemporalSplitter::frame(int i) const {
    i = std::clamp(i, 0, in_ - 1);
    return buffer_[static_cast<std::size_t>(i - base_)];
}

ChannelFrame TemporalSplitter::pop() {
    if (!ready()) throw Error("temporal splitter: no frame ready");
    const Frame& centre = frame(out_);
    const int w = centre.width(), h = centre.height();
    const std::size_t n = centre[0].size();

    // Source DKL plane for each visual channel.
    constexpr std::array<int, kNumChannels> src{0, 0, 1, 2};
    ChannelFrame out;
    for (int c = 0; c < kNumChannels; ++c) {
        const auto& k = bank_.kernels[c];
        if (k.empty()) continue;
        out[c] = Plane(w, h);
        float* dst = out[c].data.data();
        const float kc = static_cast<float>(k[half_]);
        const float* x0 = frame(out_)[src[c]].data.data();
        for (std::size_t i = 0; i < n; ++i) dst[i] = kc * x0[i];
        for (int j = 1; j <= half_; ++j) {
            const float kj = static_cast<float>(k[half_ + j]);
            const float* a = frame(out_ - j)[src[c]].data.data();
            const float* b = frame(out_ + j)[src[c]].data.data();
            for (std::size_t i = 0; i < n; ++i) dst[i] += kj * (a[i] + b[i]);
        }
    }
    ++out_;
    // Drop frames no longer reachable; frame in_-1 stays for end padding.
    while (!buffer_.empty() && base_ < out_ - half_ && base_ < in_ - 1) {
        buffer_.pop_front();
        ++base_;
    }
    return out;
}

std::vector<ChannelFrame> split_channels(const std::vector<Frame>& dkl, const TemporalFilterBank& bank) {
    TemporalSplitter s(bank);
    std::vector<ChannelFrame> out;
    out.reserve(dkl.size());
    for (const auto& f : dkl) {
        s.push(f);
        while (s.ready()) out.push_back(s.pop());
    }
    s.finish();
    while (s.ready()) out.push_back(s.pop());
    return out;
}

ChannelFrame image_channels(const Frame& dkl) {
    ChannelFrame out;
    out[index(VisualChannel::ach_sust)] = dkl[0];
    out[index(VisualChannel::rg)] = dkl[1];
    out[index(VisualChannel::yv)] = dkl[2];
    return out;
}

}  // namespace cvvdp::temporal
