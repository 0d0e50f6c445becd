#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <vector>

namespace cvvdp {

// Single-channel float image, row-major.
struct Plane {
    int width = 0;
    int height = 0;
    std::vector<float> data;

    Plane() = default;
    Plane(int w, int h, float value = 0.0f)
        : width(w), height(h), data(static_cast<std::size_t>(w) * h, value) {}

    std::size_t size() const { return data.size(); }
    bool empty() const { return data.empty(); }

    float& at(int x, int y) { return data[static_cast<std::size_t>(y) * width + x]; }
    float at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }

    float* row(int y) { return data.data() + static_cast<std::size_t>(y) * width; }
    const float* row(int y) const { return data.data() + static_cast<std::size_t>(y) * width; }

    void fill(float v) { std::fill(data.begin(), data.end(), v); }
};

// Three planes sharing geometry. Meaning of the channels depends on the
// stage: encoded RGB, linear RGB, XYZ or DKL.
struct Frame {
    std::array<Plane, 3> c;

    Frame() = default;
    Frame(int w, int h, float value = 0.0f) : c{Plane(w, h, value), Plane(w, h, value), Plane(w, h, value)} {}

    int width() const { return c[0].width; }
    int height() const { return c[0].height; }
    Plane& operator[](int i) { return c[i]; }
    const Plane& operator[](int i) const { return c[i]; }
};

using Video = std::vector<Frame>;

}  // namespace cvvdp
