#pragma once

#include <array>

namespace cvvdp {

// Visual channels after temporal filtering, in the order used by all
// per-channel parameter arrays.
enum class VisualChannel : int { ach_sust = 0, ach_trans = 1, rg = 2, yv = 3 };

inline constexpr int kNumChannels = 4;

inline constexpr std::array<const char*, kNumChannels> kChannelLabels{"A-sust", "A-trans", "RG", "YV"};

// Temporal frequency at which the channel sensitivity is evaluated.
inline constexpr std::array<double, kNumChannels> kChannelOmega{0.0, 5.0, 0.0, 0.0};

constexpr int index(VisualChannel c) { return static_cast<int>(c); }

}  // namespace cvvdp
