#pragma once

#include <array>
#include <string>
#include <vector>

#include "cvvdp/image.hpp"
#include "cvvdp/params.hpp"
#include "cvvdp/pooling.hpp"

namespace cvvdp::viz {

enum class Colormap { viridis, gray };

Colormap parse_colormap(const std::string& name);
// t in [0,1] -> RGB in [0,1] (display encoded).
std::array<float, 3> colormap(Colormap map, double t);

struct HeatmapStyle {
    Colormap map = Colormap::viridis;
    double opacity = 0.7;
    // JOD drop mapped to the top of the colour scale.
    double jod_range = 2.0;
};

// Colour overlay of a per-pixel JOD map on the grayscale test frame.
Frame render_heatmap(const Frame& test, const Plane& jod_map, const HeatmapStyle& style = {});

struct Distogram {
    std::vector<int> channels;        // VisualChannel indices present
    std::vector<double> band_cpd;     // per band; last is the base band
    int frames = 0;
    std::vector<double> values;       // [channel][band][frame]

    int bands() const { return static_cast<int>(band_cpd.size()); }
    double at(int ci, int b, int f) const { return values[(static_cast<std::size_t>(ci) * bands() + b) * frames + f]; }
    double& at(int ci, int b, int f) { return values[(static_cast<std::size_t>(ci) * bands() + b) * frames + f]; }
};

Distogram make_distogram(const pooling::PooledFeatures& features);
// Re-pools the matrix into d_pooled; matches the metric's own pooling.
double distogram_pooled(const Distogram& d, const MetricParams& p, bool image_mode);

// Rows: channel,band_cpd,frame,value. The base band's frequency column is "BB".
void write_distogram_csv(const Distogram& d, const std::string& path);
std::string distogram_svg(const Distogram& d, Colormap map = Colormap::viridis);
void write_distogram_svg(const Distogram& d, const std::string& path, Colormap map = Colormap::viridis);

}  // namespace cvvdp::viz
