#pragma once

#include <cstddef>
#include <string>

#include "cvvdp/display.hpp"
#include "cvvdp/image.hpp"

namespace cvvdp {

struct SourceInfo {
    int width = 0;
    int height = 0;
    double fps = 0.0;  // 0 for still images
    int frames = -1;   // -1 when unknown until the end of the stream
    display::InputEncoding encoding = display::InputEncoding::display_encoded;
    std::string name;
};

// Sequential frame reader. Values are display-encoded in [0,1] unless the
// source is tagged absolute_linear.
class FrameSource {
public:
    virtual ~FrameSource() = default;
    virtual const SourceInfo& info() const = 0;
    // Returns false at the end of the stream.
    virtual bool read(Frame& out) = 0;
};

class MemorySource : public FrameSource {
public:
    MemorySource(const Video& frames, double fps,
                 display::InputEncoding encoding = display::InputEncoding::display_encoded);
    const SourceInfo& info() const override { return info_; }
    bool read(Frame& out) override;

private:
    const Video& frames_;
    SourceInfo info_;
    std::size_t next_ = 0;
};

}  // namespace cvvdp
