#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <memory>
#include <string>

#include "cvvdp/image.hpp"
#include "cvvdp/source.hpp"

namespace cvvdp::io {

struct ImageData {
    Frame frame;
    int bit_depth = 8;
    display::InputEncoding encoding = display::InputEncoding::display_encoded;
};

// 8/16-bit PNG (gray, gray+alpha, RGB, RGBA) normalized to [0,1]; alpha dropped.
ImageData read_png(const std::string& path);
void write_png(const std::string& path, const Frame& encoded, int bit_depth = 8);

// OpenEXR RGB, absolute linear cd/m^2.
ImageData read_exr(const std::string& path);
void write_exr(const std::string& path, const Frame& linear);

ImageData read_image(const std::string& path);

enum class YuvMatrix { bt709, bt2020 };
enum class Chroma { c420, c422, c444 };

struct RawFormat {
    int width = 0;
    int height = 0;
    double fps = 0.0;
    bool rgb = false;  // planar RGB instead of YUV
    Chroma chroma = Chroma::c420;
    int bit_depth = 8;  // > 8: 16-bit little-endian samples
    YuvMatrix matrix = YuvMatrix::bt709;
    bool full_range = false;
    std::string transfer = "display";  // "linear" tags absolute linear samples (float32)

    std::size_t frame_bytes() const;
};

// Reads a JSON sidecar: width, height, fps, format (rgb|yuv420|yuv422|yuv444),
// bit_depth, matrix, range (limited|full), transfer.
RawFormat read_sidecar(const std::string& path);
void write_sidecar(const std::string& path, const RawFormat& fmt);

// Planar YUV or RGB samples -> RGB [0,1] and back.
Frame decode_planar(const std::uint8_t* data, const RawFormat& fmt);
void encode_planar(const Frame& rgb, const RawFormat& fmt, std::uint8_t* out);

class ImageSource : public FrameSource {
public:
    explicit ImageSource(const std::string& path);
    const SourceInfo& info() const override { return info_; }
    bool read(Frame& out) override;

private:
    SourceInfo info_;
    Frame frame_;
    bool done_ = false;
};

// printf-style pattern such as "frames/%04d.png", numbered from `first`.
class SequenceSource : public FrameSource {
public:
    SequenceSource(std::string pattern, double fps, int first = 0);
    const SourceInfo& info() const override { return info_; }
    bool read(Frame& out) override;

private:
    std::string path_for(int i) const;
    std::string pattern_;
    SourceInfo info_;
    int next_;
};

class Y4mSource : public FrameSource {
public:
    explicit Y4mSource(const std::string& path);
    const SourceInfo& info() const override { return info_; }
    bool read(Frame& out) override;
    const RawFormat& format() const { return fmt_; }

private:
    std::ifstream in_;
    SourceInfo info_;
    RawFormat fmt_;
    std::vector<std::uint8_t> buf_;
};

class RawSource : public FrameSource {
public:
    RawSource(const std::string& path, RawFormat fmt);
    const SourceInfo& info() const override { return info_; }
    bool read(Frame& out) override;

private:
    std::ifstream in_;
    SourceInfo info_;
    RawFormat fmt_;
    std::vector<std::uint8_t> buf_;
};

class Y4mWriter {
public:
    // 4:4:4 when chroma is c444; bit_depth 8 or 16.
    Y4mWriter(const std::string& path, int width, int height, double fps, Chroma chroma = Chroma::c444,
              int bit_depth = 8);
    void write(const Frame& rgb);

private:
    std::ofstream out_;
    RawFormat fmt_;
    std::vector<std::uint8_t> buf_;
};

class RawWriter {
public:
    // Writes planar samples and a <path>.json sidecar.
    RawWriter(const std::string& path, RawFormat fmt);
    void write(const Frame& frame);

private:
    std::ofstream out_;
    RawFormat fmt_;
    std::vector<std::uint8_t> buf_;
};

// Reads ahead on a separate thread through a bounded queue.
class PrefetchSource : public FrameSource {
public:
    PrefetchSource(std::unique_ptr<FrameSource> inner, std::size_t capacity);
    ~PrefetchSource() override;
    const SourceInfo& info() const override;
    bool read(Frame& out) override;

private:
    struct State;
    std::unique_ptr<State> state_;
};

struct OpenOptions {
    double fps = 0.0;        // for image sequences, and overrides for raw without sidecar fps
    bool prefetch = true;
    double prefetch_seconds = 2.0;
};

// Writes frames chosen by extension: .png (one frame, 16-bit), .exr (one
// frame, absolute linear), .y4m (4:4:4, 8-bit), .rgb/.raw (planar RGB 16-bit
// with sidecar), or a pattern containing %d (one 16-bit PNG per frame).
void write_media(const std::string& path, const Video& frames, double fps);

// Chooses the reader by extension: .png/.exr (image), .y4m, .yuv/.rgb/.raw
// (needs <path>.json), or a pattern containing '%'.
std::unique_ptr<FrameSource> open_source(const std::string& path, const OpenOptions& options = {});

}  // namespace cvvdp::io
