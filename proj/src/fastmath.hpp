#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>

// Branch-free float log2/exp2 for per-pixel loops; relative error ~2e-7.
namespace cvvdp::fastmath {

inline float bits_to_float(std::uint32_t u) {
    float f;
    std::memcpy(&f, &u, sizeof f);
    return f;
}

inline std::uint32_t float_to_bits(float f) {
    std::uint32_t u;
    std::memcpy(&u, &f, sizeof u);
    return u;
}

// x > 0, finite.
inline float log2(float x) {
    const std::uint32_t u = float_to_bits(x);
    // Mantissa mapped into [sqrt(0.5), sqrt(2)).
    const std::uint32_t off = u - 0x3f3504f3u;
    const int e = static_cast<std::int32_t>(off) >> 23;
    const float m = bits_to_float((off & 0x007fffffu) + 0x3f3504f3u);
    const float t = (m - 1.0f) / (m + 1.0f);
    const float t2 = t * t;
    const float s = t * (2.0f + t2 * (0.6666666667f + t2 * (0.4f + t2 * (0.2857142857f + t2 * 0.2222222222f))));
    return static_cast<float>(e) + s * 1.4426950408889634f;
}

inline float exp2(float y) {
    y = std::min(std::max(y, -126.0f), 127.0f);
    // Truncation of a positive value rounds to nearest.
    const float n = static_cast<float>(static_cast<int>(y + 128.5f) - 128);
    const float f = (y - n) * 0.6931471805599453f;
    const float p =
        1.0f + f * (1.0f + f * (0.5f + f * (0.16666667f + f * (0.041666668f + f * (0.008333334f + f * (0.0013888889f + f * 0.0001984127f))))));
    const std::uint32_t scale = static_cast<std::uint32_t>(static_cast<int>(n) + 127) << 23;
    return p * bits_to_float(scale);
}

// x^y for x >= 0 with 0^y = 0.
inline float pow_pos(float x, float y) {
    const float r = exp2(y * log2(std::max(x, 1e-37f)));
    return x > 0.0f ? r : 0.0f;
}

inline float log10(float x) { return log2(x) * 0.30102999566398120f; }
inline float exp10(float y) { return exp2(y * 3.3219280948873623f); }

}  // namespace cvvdp::fastmath
