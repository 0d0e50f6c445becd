#pragma once

#include <vector>

#include "cvvdp/image.hpp"

namespace cvvdp::pyramid {

enum class BandKind { high_pass, band_pass, base };

// Peak response of a band-pass band relative to ppd/2^b.
inline constexpr double kBandPeakFactor = 0.3228;
inline constexpr double kMinBandFrequency = 0.2;
// Contrast denominator clamp, cd/m^2.
inline constexpr double kMinBackground = 0.01;

// Burt-Adelson 5-tap reduce/expand with edge replication.
Plane reduce(const Plane& in);
Plane expand(const Plane& in, int width, int height);

// Number of bands (including high-pass and base) for a frame size and ppd.
int band_count(int width, int height, double ppd);
std::vector<double> band_frequencies(int bands, double ppd);
BandKind band_kind(int band, int bands);

struct LaplacianPyramid {
    // bands[0..n-2] Laplacian, bands[n-1] the Gaussian base.
    std::vector<Plane> bands;
    // Optional: expand(G_{b+1}) at band b resolution for b < n-1, and the
    // base Gaussian at n-1. Serves as the local background luminance.
    std::vector<Plane> background;

    int size() const { return static_cast<int>(bands.size()); }
    Plane reconstruct() const;
};

LaplacianPyramid decompose(const Plane& in, int bands, bool keep_background = false);

// Band-limited contrast P / max(L_bkg, clamp), doubled for band-pass bands.
Plane band_contrast(const Plane& band, const Plane& background, BandKind kind,
                    double min_background = kMinBackground);

}  // namespace cvvdp::pyramid
