#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>

#include "cvvdp/image.hpp"
#include "cvvdp/mat3.hpp"

namespace cvvdp::display {

enum class Eotf { srgb, pq, gamma, linear };

// How the pixel values of a source should be read.
enum class InputEncoding {
    display_encoded,  // [0,1] code values, go through the EOTF
    absolute_linear,  // linear RGB in cd/m^2 (EXR)
};

Eotf parse_eotf(const std::string& name);
std::string eotf_name(Eotf e);

// RGB->XYZ for the given chromaticities, white normalized to Y = 1.
Mat3 primaries_matrix(double xr, double yr, double xg, double yg, double xb, double yb, double xw,
                      double yw);
Mat3 named_primaries(const std::string& name);  // bt709 / srgb, p3, bt2020

struct DisplaySpec {
    std::string name = "custom";
    double width_m = 0.5313;
    int resolution_w = 1920;
    int resolution_h = 1080;
    double viewing_distance_m = 0.6;
    double L_peak = 200.0;
    double L_black = 0.2;
    double k_refl = 0.005;
    double E_amb = 250.0;
    Eotf eotf = Eotf::srgb;
    double gamma = 2.2;
    Mat3 rgb_to_xyz = named_primaries("bt709");
    // Used instead of the geometric value when set (quoted value or CLI flag).
    std::optional<double> ppd_override;

    void validate() const;
};

double compute_ppd(const DisplaySpec& spec);
// ppd_override when present, else compute_ppd.
double effective_ppd(const DisplaySpec& spec);

double reflected_luminance(double k_refl, double E_amb);

// Normalized transfer: code value in [0,1] -> relative light in [0,1].
// For PQ the result is absolute / 10000.
double eotf_normalized(Eotf e, double v, double gamma = 2.2);
double inverse_eotf_normalized(Eotf e, double l, double gamma = 2.2);
double pq_eotf(double v);  // cd/m^2
double pq_inverse(double L);

// Linear light of one channel (cd/m^2, including reflections).
double channel_luminance(const DisplaySpec& spec, double v);

struct ForwardStats {
    std::size_t clamped = 0;
};

// Encoded RGB (or absolute linear) frame -> XYZ in cd/m^2.
Frame forward_display(const Frame& input, const DisplaySpec& spec,
                      InputEncoding encoding = InputEncoding::display_encoded,
                      ForwardStats* stats = nullptr);

// Inverse of forward_display for display-encoded output. in_gamut is
// cleared when some pixel needed a value outside [0,1].
Frame inverse_display(const Frame& xyz, const DisplaySpec& spec, bool* in_gamut = nullptr);

// Per-channel linear light in cd/m^2 (before the primaries matrix).
Frame linear_rgb(const Frame& input, const DisplaySpec& spec,
                 InputEncoding encoding = InputEncoding::display_encoded, ForwardStats* stats = nullptr);

std::map<std::string, DisplaySpec> builtin_displays();
std::map<std::string, DisplaySpec> load_displays(const std::string& path);
// Looks in the config file first (if given), then the built-in presets.
DisplaySpec find_display(const std::string& name, const std::string& config_path = "");

}  // namespace cvvdp::display
