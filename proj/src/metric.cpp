#include "cvvdp/metric.hpp"

#include <cmath>
#include <deque>
#include <optional>

#include "cvvdp/color_space.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/masking.hpp"
#include "cvvdp/parallel.hpp"
#include "cvvdp/pyramid.hpp"
#include "fastmath.hpp"

namespace cvvdp {

namespace {

constexpr int kAch = index(VisualChannel::ach_sust);

// Runs a pipeline stage, tagging library errors with stage and frame.
template <class Fn>
auto staged(const char* stage, int frame, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, frame, e.what());
    }
}

Plane log10_plane(const Plane& L) {
    Plane out(L.width, L.height);
    for (std::size_t i = 0; i < L.size(); ++i) out.data[i] = fastmath::log10(std::max(L.data[i], 1e-12f));
    return out;
}

Plane sensitivity_plane(const csf::BandSensitivity& bs, const Plane& log_L, float scale) {
    Plane S(log_L.width, log_L.height);
    for (std::size_t i = 0; i < log_L.size(); ++i) S.data[i] = scale * fastmath::exp10(bs.log10_at(log_L.data[i]));
    return S;
}

// (sum_c (w_c D_c)^beta_c)^(1/beta_c) per pixel.
void accumulate_channel_pool(Plane& acc, const Plane& D, double w, double beta_c) {
    if (acc.empty()) acc = Plane(D.width, D.height);
    const float wf = static_cast<float>(w);
    for (std::size_t i = 0; i < D.size(); ++i) acc.data[i] += fastmath::pow_pos(wf * D.data[i], static_cast<float>(beta_c));
}

void finish_channel_pool(Plane& acc, double beta_c) {
    const float inv = static_cast<float>(1.0 / beta_c);
    for (auto& v : acc.data) v = fastmath::pow_pos(v, inv);
}

}  // namespace

Metric::Metric(display::DisplaySpec display, MetricParams params, csf::CastleCsfParams csf_params,
               std::shared_ptr<const csf::CsfLut> lut)
    : display_(std::move(display)), params_(std::move(params)), csf_params_(std::move(csf_params)), lut_(std::move(lut)) {
    display_.validate();
    params_.validate();
    csf_params_.validate();
    if (!lut_) lut_ = csf::cached_lut(csf_params_);
    rgb_to_dkl_ = mul(color::xyz_to_dkl_matrix(), display_.rgb_to_xyz);
    ppd_ = display::effective_ppd(display_);
}

Frame Metric::to_dkl(const Frame& input, display::InputEncoding encoding, std::size_t* clamped) const {
    display::ForwardStats stats;
    Frame f = display::linear_rgb(input, display_, encoding, &stats);
    color::apply_matrix_inplace(f, rgb_to_dkl_);
    if (clamped) *clamped += stats.clamped;
    return f;
}

FrameDifference Metric::frame_difference(const temporal::ChannelFrame& test, const temporal::ChannelFrame& ref,
                                         bool want_map, int threads) const {
    const MetricParams& p = params_;
    const int w = ref[kAch].width, h = ref[kAch].height;
    const int nb = pyramid::band_count(w, h, ppd_);
    const auto rho = pyramid::band_frequencies(nb, ppd_);

    std::array<bool, kNumChannels> active{};
    for (int c = 0; c < kNumChannels; ++c) {
        active[c] = !ref[c].empty();
        if (active[c] != !test[c].empty()) throw PairingError("test and reference differ in visual channels");
    }

    std::array<pyramid::LaplacianPyramid, kNumChannels> pt, pr;
    parallel_for(2 * kNumChannels, threads, [&](int i) {
        const int c = i / 2;
        if (!active[c]) return;
        if (i % 2 == 0)
            pt[c] = pyramid::decompose(test[c], nb, c == kAch);
        else
            pr[c] = pyramid::decompose(ref[c], nb, c == kAch);
    });

    FrameDifference out;
    for (int c = 0; c < kNumChannels; ++c)
        if (active[c]) out.features[c].assign(nb, 0.0);
    std::vector<Plane> H(want_map ? nb : 0);

    for (int b = 0; b < nb - 1; ++b) {
        const auto kind = pyramid::band_kind(b, nb);
        const Plane& Lt = pt[kAch].background[b];
        const Plane& Lr = pr[kAch].background[b];
        const Plane log_Lr = log10_plane(Lr);
        masking::BandPlanes T, R;
        parallel_for(kNumChannels, threads, [&](int c) {
            if (!active[c]) return;
            const auto ch = static_cast<VisualChannel>(c);
            const Plane S = sensitivity_plane(csf::BandSensitivity(*lut_, ch, rho[b]), log_Lr, 1.0f);
            T[c] = pyramid::band_contrast(pt[c].bands[b], Lt, kind, p.min_background);
            R[c] = pyramid::band_contrast(pr[c].bands[b], Lr, kind, p.min_background);
            masking::encode_plane(T[c], S, ch, p);
            masking::encode_plane(R[c], S, ch, p);
        });
        masking::BandPlanes D = masking::band_difference(T, R, p);
        for (int c = 0; c < kNumChannels; ++c) {
            if (!active[c]) continue;
            masking::soft_clamp_plane(D[c], p.k_c);
            out.features[c][b] = pooling::band_feature(D[c], p.beta_x);
            if (want_map) accumulate_channel_pool(H[b], D[c], p.w[c], p.beta_c);
        }
    }

    // Base band: Gaussian residual relative to the frame's mean sustained
    // luminance, so that a uniform shift is weighed as a contrast.
    const int bb = nb - 1;
    auto mean_background = [&](const Plane& G) {
        double s = 0.0;
        for (float v : G.data) s += std::max(v, static_cast<float>(p.min_background));
        return s / static_cast<double>(G.size());
    };
    const double mean_t = mean_background(pt[kAch].bands[bb]);
    const double mean_r = mean_background(pr[kAch].bands[bb]);
    const float inv_t = static_cast<float>(1.0 / mean_t), inv_r = static_cast<float>(1.0 / mean_r);
    for (int c = 0; c < kNumChannels; ++c) {
        if (!active[c]) continue;
        const auto ch = static_cast<VisualChannel>(c);
        const double S = p.s_corr * p.s_ch[c] * lut_->lookup(ch, mean_r, rho[bb]);
        const float scale = static_cast<float>(p.k_b[c] * S);
        const auto& gt = pt[c].bands[bb].data;
        const auto& gr = pr[c].bands[bb].data;
        Plane D(pr[c].bands[bb].width, pr[c].bands[bb].height);
        for (std::size_t i = 0; i < D.size(); ++i) D.data[i] = scale * std::abs(gt[i] * inv_t - gr[i] * inv_r);
        masking::soft_clamp_plane(D, p.k_c);
        out.features[c][bb] = pooling::band_feature(D, p.beta_x);
        if (want_map) accumulate_channel_pool(H[bb], D, p.w[c], p.beta_c);
    }

    if (want_map) {
        for (auto& hb : H) finish_channel_pool(hb, p.beta_c);
        Plane acc = std::move(H[bb]);
        for (int b = bb - 1; b >= 0; --b) {
            Plane up = pyramid::expand(acc, H[b].width, H[b].height);
            for (std::size_t i = 0; i < up.size(); ++i) up.data[i] = std::max(0.0f, up.data[i]) + H[b].data[i];
            acc = std::move(up);
        }
        out.distortion = std::move(acc);
    }
    return out;
}

MetricResult Metric::evaluate(FrameSource& test, FrameSource& ref, const EvalOptions& options) const {
    const SourceInfo& ti = test.info();
    const SourceInfo& ri = ref.info();
    if (ti.width != ri.width || ti.height != ri.height)
        throw PairingError("test is " + std::to_string(ti.width) + "x" + std::to_string(ti.height) +
                           " but reference is " + std::to_string(ri.width) + "x" + std::to_string(ri.height));
    if (std::abs(ti.fps - ri.fps) > 1e-6)
        throw PairingError("test and reference frame rates differ (" + std::to_string(ti.fps) + " vs " +
                           std::to_string(ri.fps) + ")");
    if (ti.frames >= 0 && ri.frames >= 0 && ti.frames != ri.frames)
        throw PairingError("test has " + std::to_string(ti.frames) + " frames, reference has " +
                           std::to_string(ri.frames));

    const int threads = options.threads <= 0 ? default_threads() : options.threads;
    const bool want_map = static_cast<bool>(options.heatmap);

    MetricResult result;
    result.ppd = ppd_;
    result.fps = ti.fps;
    result.width = ti.width;
    result.height = ti.height;

    int read_index = 0;
    auto read_pair = [&](Frame& t, Frame& r) {
        const bool ht = staged("read test", read_index, [&] { return test.read(t); });
        const bool hr = staged("read reference", read_index, [&] { return ref.read(r); });
        if (ht != hr) throw PairingError("test and reference end at different frames (" + std::to_string(read_index) + ")");
        if (ht && (t.width() != r.width() || t.height() != r.height()))
            throw PairingError("frame " + std::to_string(read_index) + " sizes differ");
        if (ht) ++read_index;
        return ht;
    };

    Frame t0, r0, t1, r1;
    if (!read_pair(t0, r0)) throw PairingError("empty input");
    const bool second = read_pair(t1, r1);

    auto convert = [&](const Frame& t, const Frame& r, int f, Frame& dt, Frame& dr) {
        staged("display", f, [&] {
            dt = to_dkl(t, ti.encoding, &result.clamped_test);
            dr = to_dkl(r, ri.encoding, &result.clamped_ref);
        });
    };

    auto emit_map = [&](int f, const Frame& t, const Plane& distortion) {
        const Plane jod = staged("heatmap", f, [&] { return distortion_to_jod(distortion, params_); });
        options.heatmap(f, t, jod);
    };

    if (!second) {
        Frame dt, dr;
        convert(t0, r0, 0, dt, dr);
        const auto ct = temporal::image_channels(dt);
        const auto cr = temporal::image_channels(dr);
        auto diff = staged("contrast", 0, [&] { return frame_difference(ct, cr, want_map, threads); });
        result.image_mode = true;
        result.frames = 1;
        result.features.frames.push_back(std::move(diff.features));
        if (want_map) emit_map(0, t0, diff.distortion);
    } else {
        if (!(ti.fps > 0.0)) throw ConfigError("video input needs fps > 0");
        const auto bank = temporal::TemporalFilterBank::design(ti.fps, csf_params_);
        temporal::TemporalSplitter st(bank), sr(bank);
        std::deque<Frame> pending_test;  // encoded test frames waiting for their heatmap
        int out_index = 0;

        auto push = [&](const Frame& t, const Frame& r, int f) {
            Frame dt, dr;
            convert(t, r, f, dt, dr);
            st.push(std::move(dt));
            sr.push(std::move(dr));
            if (want_map) pending_test.push_back(t);
        };
        auto drain = [&] {
            while (st.ready() && sr.ready()) {
                const int f = out_index++;
                auto ct = staged("temporal", f, [&] { return st.pop(); });
                auto cr = staged("temporal", f, [&] { return sr.pop(); });
                auto diff = staged("contrast", f, [&] { return frame_difference(ct, cr, want_map, threads); });
                if (want_map) {
                    emit_map(f, pending_test.front(), diff.distortion);
                    pending_test.pop_front();
                }
                result.features.frames.push_back(std::move(diff.features));
            }
        };

        push(t0, r0, 0);
        push(t1, r1, 1);
        drain();
        Frame t, r;
        while (read_pair(t, r)) {
            push(t, r, read_index - 1);
            drain();
        }
        st.finish();
        sr.finish();
        drain();
        result.frames = static_cast<int>(result.features.frames.size());
    }

    const int nb = pyramid::band_count(result.width, result.height, ppd_);
    result.features.bands = nb;
    result.features.band_frequencies = pyramid::band_frequencies(nb, ppd_);
    for (int c = 0; c < kNumChannels; ++c) result.features.active[c] = !result.features.frames[0][c].empty();

    const double d = result.image_mode ? pooling::pool_image(result.features, params_)
                                       : pooling::pool_video(result.features, params_);
    result.score = pooling::jod_regress(d, params_);
    return result;
}

MetricResult Metric::evaluate(const Frame& test, const Frame& ref, const EvalOptions& options) const {
    const Video t{test}, r{ref};
    MemorySource st(t, 0.0), sr(r, 0.0);
    return evaluate(st, sr, options);
}

MetricResult Metric::evaluate(const Video& test, const Video& ref, double fps, const EvalOptions& options) const {
    MemorySource st(test, fps), sr(ref, fps);
    return evaluate(st, sr, options);
}

Plane distortion_to_jod(const Plane& distortion, const MetricParams& p) {
    Plane jod(distortion.width, distortion.height);
    for (std::size_t i = 0; i < jod.size(); ++i) jod.data[i] = static_cast<float>(pooling::jod_regress(distortion.data[i], p).jod);
    return jod;
}

}  // namespace cvvdp
