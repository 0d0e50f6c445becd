#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvvdp/display.hpp"
#include "cvvdp/image.hpp"

namespace cvvdp::distort {

enum class Kind { dither, lsnu, blur, contrast, wgnu, dce, fringes, chroma_ss };

inline constexpr std::array<Kind, 8> kAllKinds{Kind::dither, Kind::lsnu,    Kind::blur,    Kind::contrast,
                                               Kind::wgnu,   Kind::dce,     Kind::fringes, Kind::chroma_ss};

Kind parse_kind(const std::string& name);
std::string kind_name(Kind k);

struct DistortionSpec {
    Kind kind = Kind::blur;
    int level = 1;  // 0 is the identity
    std::uint64_t seed = 0;

    void validate() const;
};

enum class ChromaSpace { ycbcr, yxy, rgb };
ChromaSpace parse_chroma_space(const std::string& name);
std::string chroma_space_name(ChromaSpace s);

// Tunable parameters of the generators; index 0 is level 1.
struct DistortionConfig {
    std::array<int, 3> dither_bits{6, 5, 4};
    std::array<double, 3> lsnu_sigma{0.06, 0.08, 0.09};
    double lsnu_truncation = 4.0;  // in sigmas
    std::array<double, 3> blur_sigma_px77{0.8, 1.3, 2.0};
    std::array<double, 3> blur_green_shrink_px77{0.0, 2.0, 2.0};
    std::array<double, 3> contrast_ratio{100.0, 50.0, 30.0};
    std::array<double, 3> wgnu_amplitude{0.15, 0.3, 0.4};
    std::array<int, 3> wgnu_cycles{1, 4, 7};
    double wgnu_max_cpd = 1.0;
    int wgnu_components = 8;
    std::array<double, 3> dce_sigma_deg{0.27, 0.39, 0.58};
    double dce_gain = 0.3;
    // (dx, dy) in pixels for red and blue.
    std::array<std::array<double, 4>, 3> fringe_shift{{{0.0, 0.5, -0.5, 0.0}, {1.0, 0.5, 0.5, -1.0}, {1.5, 1.0, 1.0, -1.0}}};
    std::array<int, 3> chroma_factor{4, 8, 12};
    ChromaSpace chroma_space = ChromaSpace::ycbcr;

    nlohmann::json to_json() const;
    static DistortionConfig from_json(const nlohmann::json& j);
    static DistortionConfig load(const std::string& path);
};

// 64x64 blue-noise threshold tile in (0,1), void-and-cluster from the seed.
std::vector<float> blue_noise_tile(std::uint64_t seed, int size = 64);

// Per-frame application; `frames` is the sequence length (1 for images).
class Distorter {
public:
    Distorter(const DistortionSpec& spec, int width, int height, int frames, double ppd,
              const display::DisplaySpec& display, const DistortionConfig& config = {});
    Frame apply(const Frame& encoded, int frame_index) const;
    const DistortionSpec& spec() const { return spec_; }

private:
    struct Pattern {
        std::vector<double> fx, fy, phase, amp;  // cycles per pixel
        double eval(double x, double y) const;
    };

    Frame to_linear(const Frame& f) const;
    Frame from_linear(const Frame& f) const;
    Frame gain_field(const Frame& encoded, int frame_index) const;

    DistortionSpec spec_;
    int w_, h_, frames_;
    double ppd_;
    display::DisplaySpec display_;
    DistortionConfig cfg_;
    std::vector<float> tile_;
    std::array<Plane, 3> lsnu_gain_;
    std::array<std::array<Pattern, 2>, 3> patterns_;
    std::vector<std::array<double, 2>> dce_offsets_;
};

Video apply(const Video& in, const DistortionSpec& spec, double ppd, const display::DisplaySpec& display,
            const DistortionConfig& config = {});
Frame apply(const Frame& in, const DistortionSpec& spec, double ppd, const display::DisplaySpec& display,
            const DistortionConfig& config = {});

// Seed for one corpus entry, derived from the base seed, reference name, kind and level.
std::uint64_t derive_seed(std::uint64_t base, const std::string& reference, Kind kind, int level);

struct ManifestRow {
    std::string file;
    std::string reference;
    Kind kind;
    int level;
    std::uint64_t seed;
};

// Writes 8 kinds x 3 levels per reference plus manifest.csv into out_dir.
// Images are written as 16-bit PNG; videos keep their container (y4m as
// 4:4:4, raw as planar RGB 16-bit with sidecar).
std::vector<ManifestRow> generate_corpus(const std::vector<std::string>& references, const std::string& out_dir,
                                         const display::DisplaySpec& display, std::uint64_t base_seed = 0,
                                         const DistortionConfig& config = {});

}  // namespace cvvdp::distort
