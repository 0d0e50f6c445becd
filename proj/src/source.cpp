#include "cvvdp/source.hpp"

#include "cvvdp/error.hpp"

namespace cvvdp {

MemorySource::MemorySource(const Video& frames, double fps, display::InputEncoding encoding) : frames_(frames) {
    if (!frames.empty()) {
        info_.width = frames[0].width();
        info_.height = frames[0].height();
    }
    info_.fps = fps;
    info_.frames = static_cast<int>(frames.size());
    info_.encoding = encoding;
    info_.name = "memory";
}

bool MemorySource::read(Frame& out) {
    if (next_ >= frames_.size()) return false;
    const Frame& f = frames_[next_++];
    if (f.width() != info_.width || f.height() != info_.height)
        throw FormatError("frame " + std::to_string(next_ - 1) + " changes size within the sequence");
    out = f;
    return true;
}

}  // namespace cvvdp
