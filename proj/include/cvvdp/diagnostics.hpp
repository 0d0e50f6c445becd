#pragma once

#include <array>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvvdp/channels.hpp"
#include "cvvdp/display.hpp"
#include "cvvdp/distortions.hpp"
#include "cvvdp/image.hpp"
#include "cvvdp/mat3.hpp"
#include "cvvdp/metric.hpp"
#include "cvvdp/params.hpp"

namespace cvvdp::diag {

enum class StimulusKind { grating, gabor, uniform };

StimulusKind parse_stimulus_kind(const std::string& s);

inline constexpr Vec3 kAchDirection{1.0, 0.0, 0.0};
inline constexpr Vec3 kRgDirection{0.0, 1.0, 0.0};
inline constexpr Vec3 kYvDirection{0.0, 0.0, 1.0};

struct Stimulus {
    StimulusKind kind = StimulusKind::grating;
    double rho = 2.0;          // cpd, horizontal
    double omega = 0.0;        // Hz, counter-phase flicker
    Vec3 direction = kAchDirection;  // DKL, scaled so the largest component is 1
    double contrast = 0.1;     // modulation / achromatic background
    double mean_luminance = 30.0;
    double size_deg = 4.0;     // square patch
    double duration_s = 0.0;   // 0: single frame
    double fps = 30.0;
    double phase = 0.0;        // radians
    double gabor_sigma_deg = 0.0;  // 0: size / 8

    void validate() const;
};

// Background of a stimulus in DKL (display white at the mean luminance).
Vec3 stimulus_background(const Stimulus& stim, const display::DisplaySpec& display);

// Largest contrast whose extremes stay inside the display gamut.
double max_contrast(const Stimulus& stim, const display::DisplaySpec& display);

// Display-encoded frames (one for a static stimulus). Out-of-gamut
// contrasts raise DomainError naming the largest attainable contrast.
Video render_stimulus(const Stimulus& stim, const display::DisplaySpec& display, double ppd);

// D on a uniform field, test contrast C against a blank reference.
struct CurvePoint {
    double x;
    double y;
};

std::vector<CurvePoint> self_masking_curve(VisualChannel ch, double S, const std::vector<double>& contrasts,
                                           const MetricParams& p);

// Increment on top of each mask contrast that gives D = 1 (bisection).
std::vector<CurvePoint> masking_curve(VisualChannel ch, double S, const std::vector<double>& masks,
                                      const MetricParams& p);

// Contrasts spaced evenly in log10 from lo to hi.
std::vector<double> log_space(double lo, double hi, int n);

// All six encoding x masking combinations of p.
std::vector<MetricParams> all_variants(const MetricParams& p);
std::string variant_name(const MetricParams& p);

struct MatchingConfig {
    double rho = 0.0;  // 0: peak frequency of band 2 at the metric ppd
    double mean_luminance = 30.0;
    double size_deg = 8.0;  // Gabor patch, sigma = size / 8
    std::vector<double> levels{1.5, 2.0, 3.0};
    // Optional physical contrasts (A, RG, YV) per level; computed from the
    // CSF when empty.
    std::vector<std::array<double, 3>> contrasts;
    double ratio_limit = 1.35;

    static MatchingConfig from_json(const nlohmann::json& j);
    static MatchingConfig load(const std::string& path);
};

struct MatchingRow {
    VisualChannel channel;
    double level;
    double contrast;
    double d_pooled;
    double jod;
};

struct MatchingResult {
    double rho;
    std::vector<MatchingRow> rows;
    // max/min d_pooled across the three directions, per level.
    std::vector<double> ratios;
};

// Matched physical contrast for a direction: level / (s_corr s_ch S(rho, L)).
double matched_contrast(const Metric& metric, VisualChannel ch, double level, double rho, double L);

MatchingResult matching_curve(const Metric& metric, const MatchingConfig& cfg);

struct ChromaRow {
    int image;
    distort::ChromaSpace space;
    int factor;
    double jod;
};

std::vector<ChromaRow> chroma_ss_curves(const Metric& metric, const std::vector<Frame>& images,
                                        const std::vector<distort::ChromaSpace>& spaces,
                                        const std::vector<int>& factors);

// Output helpers.
struct Series {
    std::string name;
    std::vector<CurvePoint> points;
};

std::string line_plot_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                          const std::vector<Series>& series, bool log_x, bool log_y);
void write_text(const std::string& path, const std::string& text);

// Runs one suite ("self_masking", "masking", "matching", "chroma_ss") and
// writes <suite>.csv and <suite>.svg into out_dir. Returns the CSV path.
std::string run_suite(const std::string& suite, const Metric& metric, const std::string& out_dir,
                      const nlohmann::json& options = nlohmann::json::object());

inline constexpr std::array<const char*, 4> kSuites{"self_masking", "masking", "matching", "chroma_ss"};

}  // namespace cvvdp::diag
