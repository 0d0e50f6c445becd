#pragma once

#include <array>
#include <vector>

#include "cvvdp/channels.hpp"
#include "cvvdp/image.hpp"
#include "cvvdp/params.hpp"

namespace cvvdp::masking {

using BandPlanes = std::array<Plane, kNumChannels>;

// C' = C * s_corr * s_ch,c * S
double encode_mult(double C, double S, VisualChannel c, const MetricParams& p);
// sgn(C) max{g m_c (|C| - 1/S') + 1, 0}, S' = s_corr * S
double encode_add(double C, double S, VisualChannel c, const MetricParams& p);
double encode(double C, double S, VisualChannel c, const MetricParams& p);

double soft_clamp(double D, double k_c);
// k_B,c |G_test - G_ref| S, where S already carries s_corr and s_ch.
double baseband_difference(double g_test, double g_ref, double S, VisualChannel c, const MetricParams& p);

// Masking models evaluated on spatially uniform fields (the neighbourhood
// pooling is then the identity). Only channel c carries contrast.
double mutual_difference(double t, double r, VisualChannel c, const MetricParams& p, double cross_mask = 0.0);
double transducer(double x, VisualChannel c, const MetricParams& p, double mask);
double transducer_difference(double t, double r, VisualChannel c, const MetricParams& p);
double similarity_difference(double t, double r, VisualChannel c, const MetricParams& p);
double pointwise_difference(double t, double r, VisualChannel c, const MetricParams& p);

std::vector<float> gaussian_kernel(double sigma);
// Separable Gaussian, truncated at 3 sigma, replicated edges.
void gaussian_blur(Plane& plane, double sigma);

// Encodes a physical contrast plane in place using the per-pixel CSF
// sensitivity S (without s_corr, s_ch).
void encode_plane(Plane& contrast, const Plane& S, VisualChannel c, const MetricParams& p);

// Per-channel D (before clamping) for one band from encoded contrasts.
// Channels with empty planes are skipped both as targets and maskers.
BandPlanes band_difference(const BandPlanes& test, const BandPlanes& ref, const MetricParams& p);

void soft_clamp_plane(Plane& D, double k_c);

}  // namespace cvvdp::masking
