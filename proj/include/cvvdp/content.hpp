#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cvvdp/image.hpp"

// Procedural test content (display-encoded RGB in [0,1]).
namespace cvvdp::content {

enum class ImageKind { landscape, shapes, texture };
enum class VideoKind { pan, motion };

Frame synth_image(ImageKind kind, int width, int height, std::uint64_t seed);
Video synth_video(VideoKind kind, int width, int height, int frames, std::uint64_t seed);

ImageKind parse_image_kind(const std::string& s);
VideoKind parse_video_kind(const std::string& s);

// Multi-octave smooth noise with amplitude falling as 2^(-slope * octave);
// zero mean, roughly unit peak.
Plane fractal_noise(int width, int height, std::uint64_t seed, double slope = 1.0, int base_cell = 256,
                    double offset_x = 0.0, double offset_y = 0.0);

}  // namespace cvvdp::content
