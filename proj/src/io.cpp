#include "cvvdp/io.hpp"

#include <png.h>

#include <ImfChannelList.h>
#include <ImfFrameBuffer.h>
#include <ImfHeader.h>
#include <ImfInputFile.h>
#include <ImfOutputFile.h>

#include <algorithm>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <cstring>
#include <deque>
#include <exception>
#include <filesystem>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cvvdp/error.hpp"

namespace cvvdp::io {

namespace {

std::string lower_ext(const std::string& path) {
    std::string e = std::filesystem::path(path).extension().string();
    std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
    return e;
}

struct PngFile {
    std::FILE* fp = nullptr;
    ~PngFile() {
        if (fp) std::fclose(fp);
    }
};

void png_error_fn(png_structp, png_const_charp msg) { throw FormatError(std::string("PNG: ") + msg); }
void png_warning_fn(png_structp, png_const_charp) {}

void check_geometry(int w, int h, const std::string& what) {
    if (w <= 0 || h <= 0) throw FormatError(what + ": invalid frame size " + std::to_string(w) + "x" + std::to_string(h));
}

struct YuvCoeffs {
    double kr, kb;
};

YuvCoeffs coeffs(YuvMatrix m) { return m == YuvMatrix::bt709 ? YuvCoeffs{0.2126, 0.0722} : YuvCoeffs{0.2627, 0.0593}; }

int chroma_width(const RawFormat& f) { return f.chroma == Chroma::c444 ? f.width : (f.width + 1) / 2; }
int chroma_height(const RawFormat& f) { return f.chroma == Chroma::c420 ? (f.height + 1) / 2 : f.height; }

bool float_samples(const RawFormat& f) { return f.transfer == "linear"; }
int sample_bytes(const RawFormat& f) { return float_samples(f) ? 4 : (f.bit_depth > 8 ? 2 : 1); }

double read_sample(const std::uint8_t* p, int bytes) {
    if (bytes == 1) return p[0];
    if (bytes == 2) return p[0] | (p[1] << 8);
    float v;
    std::memcpy(&v, p, 4);
    return v;
}

void write_sample(std::uint8_t* p, int bytes, double v) {
    if (bytes == 4) {
        const float f = static_cast<float>(v);
        std::memcpy(p, &f, 4);
        return;
    }
    const long q = std::lround(v);
    if (bytes == 1) {
        p[0] = static_cast<std::uint8_t>(q);
    } else {
        p[0] = static_cast<std::uint8_t>(q & 0xff);
        p[1] = static_cast<std::uint8_t>((q >> 8) & 0xff);
    }
}

Chroma parse_chroma(const std::string& s) {
    if (s == "yuv420" || s == "420") return Chroma::c420;
    if (s == "yuv422" || s == "422") return Chroma::c422;
    if (s == "yuv444" || s == "444") return Chroma::c444;
    throw FormatError("unknown chroma format '" + s + "'");
}

std::string chroma_name(Chroma c) { return c == Chroma::c420 ? "420" : (c == Chroma::c422 ? "422" : "444"); }

}  // namespace

ImageData read_png(const std::string& path) {
    PngFile file;
    file.fp = std::fopen(path.c_str(), "rb");
    if (!file.fp) throw FormatError("cannot open " + path);
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file.fp) != 8 || png_sig_cmp(sig, 0, 8)) throw FormatError(path + " is not a PNG file");

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png_create_info_struct(png);
    ImageData out;
    try {
        png_init_io(png, file.fp);
        png_set_sig_bytes(png, 8);
        png_read_info(png, info);
        const int w = static_cast<int>(png_get_image_width(png, info));
        const int h = static_cast<int>(png_get_image_height(png, info));
        const int depth = png_get_bit_depth(png, info);
        const int type = png_get_color_type(png, info);
        if (type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
        if (type == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
        if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
        if (type == PNG_COLOR_TYPE_GRAY || type == PNG_COLOR_TYPE_GRAY_ALPHA) png_set_gray_to_rgb(png);
        png_set_strip_alpha(png);
        if (depth == 16) png_set_swap(png);  // host little-endian
        png_read_update_info(png, info);
        const int bytes = depth == 16 ? 2 : 1;
        const std::size_t rowbytes = png_get_rowbytes(png, info);
        if (rowbytes != static_cast<std::size_t>(w) * 3 * bytes) throw FormatError(path + ": unexpected PNG layout");
        std::vector<png_byte> data(rowbytes * h);
        std::vector<png_bytep> rows(h);
        for (int y = 0; y < h; ++y) rows[y] = data.data() + rowbytes * y;
        png_read_image(png, rows.data());
        png_read_end(png, nullptr);

        out.frame = Frame(w, h);
        out.bit_depth = depth == 16 ? 16 : 8;
        const float scale = 1.0f / (depth == 16 ? 65535.0f : 255.0f);
        for (int y = 0; y < h; ++y) {
            const png_byte* r = rows[y];
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) {
                    const std::size_t o = (static_cast<std::size_t>(x) * 3 + c) * bytes;
                    const unsigned v = bytes == 2 ? (r[o] | (r[o + 1] << 8)) : r[o];
                    out.frame[c].at(x, y) = v * scale;
                }
        }
    } catch (...) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw;
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

void write_png(const std::string& path, const Frame& encoded, int bit_depth) {
    if (bit_depth != 8 && bit_depth != 16) throw ConfigError("PNG bit depth must be 8 or 16");
    const int w = encoded.width(), h = encoded.height();
    check_geometry(w, h, path);
    PngFile file;
    file.fp = std::fopen(path.c_str(), "wb");
    if (!file.fp) throw Error("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_error_fn, png_warning_fn);
    png_infop info = png_create_info_struct(png);
    try {
        png_init_io(png, file.fp);
        png_set_IHDR(png, info, w, h, bit_depth, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                     PNG_FILTER_TYPE_DEFAULT);
        png_write_info(png, info);
        const int bytes = bit_depth / 8;
        const float maxv = bit_depth == 16 ? 65535.0f : 255.0f;
        std::vector<png_byte> row(static_cast<std::size_t>(w) * 3 * bytes);
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x)
                for (int c = 0; c < 3; ++c) {
                    const float v = std::clamp(encoded[c].at(x, y), 0.0f, 1.0f);
                    const unsigned q = static_cast<unsigned>(std::lround(v * maxv));
                    const std::size_t o = (static_cast<std::size_t>(x) * 3 + c) * bytes;
                    if (bytes == 2) {
                        row[o] = static_cast<png_byte>(q >> 8);  // PNG is big-endian
                        row[o + 1] = static_cast<png_byte>(q & 0xff);
                    } else {
                        row[o] = static_cast<png_byte>(q);
                    }
                }
            png_write_row(png, row.data());
        }
        png_write_end(png, nullptr);
    } catch (...) {
        png_destroy_write_struct(&png, &info);
        throw;
    }
    png_destroy_write_struct(&png, &info);
}

ImageData read_exr(const std::string& path) {
    ImageData out;
    out.encoding = display::InputEncoding::absolute_linear;
    out.bit_depth = 32;
    try {
        Imf::InputFile file(path.c_str());
        const Imath::Box2i dw = file.header().dataWindow();
        const int w = dw.max.x - dw.min.x + 1, h = dw.max.y - dw.min.y + 1;
        check_geometry(w, h, path);
        const auto& channels = file.header().channels();
        const bool gray = !channels.findChannel("R") && channels.findChannel("Y");
        out.frame = Frame(w, h);
        Imf::FrameBuffer fb;
        const char* names[3] = {"R", "G", "B"};
        for (int c = 0; c < (gray ? 1 : 3); ++c) {
            char* base = reinterpret_cast<char*>(out.frame[c].data.data() - dw.min.x - static_cast<std::ptrdiff_t>(dw.min.y) * w);
            fb.insert(gray ? "Y" : names[c], Imf::Slice(Imf::FLOAT, base, sizeof(float), sizeof(float) * w, 1, 1, 0.0));
        }
        file.setFrameBuffer(fb);
        file.readPixels(dw.min.y, dw.max.y);
        if (gray) out.frame[1] = out.frame[2] = out.frame[0];
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError("EXR " + path + ": " + e.what());
    }
    return out;
}

void write_exr(const std::string& path, const Frame& linear) {
    const int w = linear.width(), h = linear.height();
    check_geometry(w, h, path);
    try {
        Imf::Header header(w, h);
        const char* names[3] = {"R", "G", "B"};
        for (const char* n : names) header.channels().insert(n, Imf::Channel(Imf::FLOAT));
        Imf::OutputFile file(path.c_str(), header);
        Imf::FrameBuffer fb;
        for (int c = 0; c < 3; ++c)
            fb.insert(names[c], Imf::Slice(Imf::FLOAT, const_cast<char*>(reinterpret_cast<const char*>(linear[c].data.data())),
                                           sizeof(float), sizeof(float) * w));
        file.setFrameBuffer(fb);
        file.writePixels(h);
    } catch (const std::exception& e) {
        throw Error("EXR " + path + ": " + e.what());
    }
}

ImageData read_image(const std::string& path) {
    const std::string e = lower_ext(path);
    if (e == ".png") return read_png(path);
    if (e == ".exr") return read_exr(path);
    throw FormatError("unsupported image format '" + e + "' (" + path + ")");
}

std::size_t RawFormat::frame_bytes() const {
    const std::size_t b = sample_bytes(*this);
    const std::size_t luma = static_cast<std::size_t>(width) * height;
    if (rgb) return 3 * luma * b;
    return (luma + 2 * static_cast<std::size_t>(chroma_width(*this)) * chroma_height(*this)) * b;
}

RawFormat read_sidecar(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw FormatError("missing sidecar " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw FormatError("sidecar " + path + ": " + e.what());
    }
    RawFormat fmt;
    try {
        fmt.width = j.at("width").get<int>();
        fmt.height = j.at("height").get<int>();
        fmt.fps = j.value("fps", 0.0);
        const std::string format = j.value("format", std::string("yuv420"));
        if (format == "rgb")
            fmt.rgb = true;
        else
            fmt.chroma = parse_chroma(format);
        fmt.bit_depth = j.value("bit_depth", 8);
        const std::string matrix = j.value("matrix", std::string("bt709"));
        if (matrix == "bt709")
            fmt.matrix = YuvMatrix::bt709;
        else if (matrix == "bt2020")
            fmt.matrix = YuvMatrix::bt2020;
        else
            throw FormatError("unknown matrix '" + matrix + "'");
        const std::string range = j.value("range", std::string("limited"));
        if (range != "limited" && range != "full") throw FormatError("unknown range '" + range + "'");
        fmt.full_range = range == "full";
        fmt.transfer = j.value("transfer", std::string("display"));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError("sidecar " + path + ": " + e.what());
    }
    check_geometry(fmt.width, fmt.height, path);
    if (fmt.bit_depth < 8 || fmt.bit_depth > 16)
        if (!(float_samples(fmt) && fmt.bit_depth == 32)) throw FormatError(path + ": bit_depth must be 8..16");
    if (float_samples(fmt) && !fmt.rgb) throw FormatError(path + ": linear samples must be planar rgb");
    return fmt;
}

void write_sidecar(const std::string& path, const RawFormat& fmt) {
    nlohmann::json j;
    j["width"] = fmt.width;
    j["height"] = fmt.height;
    j["fps"] = fmt.fps;
    j["format"] = fmt.rgb ? std::string("rgb") : "yuv" + chroma_name(fmt.chroma);
    j["bit_depth"] = fmt.bit_depth;
    j["matrix"] = fmt.matrix == YuvMatrix::bt709 ? "bt709" : "bt2020";
    j["range"] = fmt.full_range ? "full" : "limited";
    j["transfer"] = fmt.transfer;
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << j.dump(2) << '\n';
}

Frame decode_planar(const std::uint8_t* data, const RawFormat& fmt) {
    const int w = fmt.width, h = fmt.height;
    const int bytes = sample_bytes(fmt);
    Frame out(w, h);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (fmt.rgb) {
        const double scale = float_samples(fmt) ? 1.0 : 1.0 / ((1 << fmt.bit_depth) - 1);
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < n; ++i)
                out[c].data[i] = static_cast<float>(read_sample(data + (c * n + i) * bytes, bytes) * scale);
        return out;
    }
    const int cw = chroma_width(fmt), ch = chroma_height(fmt);
    const std::size_t cn = static_cast<std::size_t>(cw) * ch;
    const double maxv = (1 << fmt.bit_depth) - 1;
    const double s = std::exp2(fmt.bit_depth - 8);
    const double y_off = fmt.full_range ? 0.0 : 16.0 * s, y_rng = fmt.full_range ? maxv : 219.0 * s;
    const double c_off = fmt.full_range ? std::exp2(fmt.bit_depth - 1) : 128.0 * s, c_rng = fmt.full_range ? maxv : 224.0 * s;
    const auto [kr, kb] = coeffs(fmt.matrix);
    const double kg = 1.0 - kr - kb;
    const std::uint8_t* yp = data;
    const std::uint8_t* up = data + n * bytes;
    const std::uint8_t* vp = up + cn * bytes;
    const int sx = fmt.chroma == Chroma::c444 ? 0 : 1, sy = fmt.chroma == Chroma::c420 ? 1 : 0;
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const std::size_t ci = static_cast<std::size_t>(y >> sy) * cw + (x >> sx);
            const double Y = (read_sample(yp + i * bytes, bytes) - y_off) / y_rng;
            const double Cb = (read_sample(up + ci * bytes, bytes) - c_off) / c_rng;
            const double Cr = (read_sample(vp + ci * bytes, bytes) - c_off) / c_rng;
            const double R = Y + (2.0 - 2.0 * kr) * Cr;
            const double B = Y + (2.0 - 2.0 * kb) * Cb;
            const double G = (Y - kr * R - kb * B) / kg;
            out[0].data[i] = static_cast<float>(std::clamp(R, 0.0, 1.0));
            out[1].data[i] = static_cast<float>(std::clamp(G, 0.0, 1.0));
            out[2].data[i] = static_cast<float>(std::clamp(B, 0.0, 1.0));
        }
    return out;
}

void encode_planar(const Frame& rgb, const RawFormat& fmt, std::uint8_t* out) {
    const int w = fmt.width, h = fmt.height;
    if (rgb.width() != w || rgb.height() != h) throw DomainError("frame size does not match the output format");
    const int bytes = sample_bytes(fmt);
    const std::size_t n = static_cast<std::size_t>(w) * h;
    if (fmt.rgb) {
        const double maxv = (1 << fmt.bit_depth) - 1;
        for (int c = 0; c < 3; ++c)
            for (std::size_t i = 0; i < n; ++i) {
                const double v = rgb[c].data[i];
                write_sample(out + (c * n + i) * bytes, bytes, float_samples(fmt) ? v : std::clamp(v, 0.0, 1.0) * maxv);
            }
        return;
    }
    const int cw = chroma_width(fmt), ch = chroma_height(fmt);
    const std::size_t cn = static_cast<std::size_t>(cw) * ch;
    const double maxv = (1 << fmt.bit_depth) - 1;
    const double s = std::exp2(fmt.bit_depth - 8);
    const double y_off = fmt.full_range ? 0.0 : 16.0 * s, y_rng = fmt.full_range ? maxv : 219.0 * s;
    const double c_off = fmt.full_range ? std::exp2(fmt.bit_depth - 1) : 128.0 * s, c_rng = fmt.full_range ? maxv : 224.0 * s;
    const auto [kr, kb] = coeffs(fmt.matrix);
    const double kg = 1.0 - kr - kb;
    std::vector<double> cb(n), cr(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double R = std::clamp<double>(rgb[0].data[i], 0.0, 1.0);
        const double G = std::clamp<double>(rgb[1].data[i], 0.0, 1.0);
        const double B = std::clamp<double>(rgb[2].data[i], 0.0, 1.0);
        const double Y = kr * R + kg * G + kb * B;
        cb[i] = (B - Y) / (2.0 - 2.0 * kb);
        cr[i] = (R - Y) / (2.0 - 2.0 * kr);
        write_sample(out + i * bytes, bytes, std::clamp(y_off + Y * y_rng, 0.0, maxv));
    }
    const int sx = fmt.chroma == Chroma::c444 ? 0 : 1, sy = fmt.chroma == Chroma::c420 ? 1 : 0;
    std::uint8_t* up = out + n * bytes;
    std::uint8_t* vp = up + cn * bytes;
    for (int y = 0; y < ch; ++y)
        for (int x = 0; x < cw; ++x) {
            double su = 0.0, sv = 0.0;
            int cnt = 0;
            for (int dy = 0; dy <= sy; ++dy)
                for (int dx = 0; dx <= sx; ++dx) {
                    const int px = std::min((x << sx) + dx, w - 1), py = std::min((y << sy) + dy, h - 1);
                    su += cb[static_cast<std::size_t>(py) * w + px];
                    sv += cr[static_cast<std::size_t>(py) * w + px];
                    ++cnt;
                }
            const std::size_t ci = static_cast<std::size_t>(y) * cw + x;
            write_sample(up + ci * bytes, bytes, std::clamp(c_off + su / cnt * c_rng, 0.0, maxv));
            write_sample(vp + ci * bytes, bytes, std::clamp(c_off + sv / cnt * c_rng, 0.0, maxv));
        }
}

ImageSource::ImageSource(const std::string& path) {
    ImageData d = read_image(path);
    frame_ = std::move(d.frame);
    info_.width = frame_.width();
    info_.height = frame_.height();
    info_.fps = 0.0;
    info_.frames = 1;
    info_.encoding = d.encoding;
    info_.name = path;
}

bool ImageSource::read(Frame& out) {
    if (done_) return false;
    out = frame_;
    done_ = true;
    return true;
}

SequenceSource::SequenceSource(std::string pattern, double fps, int first) : pattern_(std::move(pattern)), next_(first) {
    if (!(fps > 0.0)) throw ConfigError("image sequence " + pattern_ + " needs --fps");
    const std::string p0 = path_for(first);
    if (!std::filesystem::exists(p0)) throw FormatError("image sequence: first frame " + p0 + " not found");
    ImageData d = read_image(p0);
    info_.width = d.frame.width();
    info_.height = d.frame.height();
    info_.fps = fps;
    info_.encoding = d.encoding;
    info_.name = pattern_;
    int count = 0;
    while (std::filesystem::exists(path_for(first + count))) ++count;
    info_.frames = count;
}

std::string SequenceSource::path_for(int i) const {
    std::vector<char> buf(pattern_.size() + 32);
    std::snprintf(buf.data(), buf.size(), pattern_.c_str(), i);
    return buf.data();
}

bool SequenceSource::read(Frame& out) {
    const std::string p = path_for(next_);
    if (!std::filesystem::exists(p)) return false;
    ImageData d = read_image(p);
    if (d.frame.width() != info_.width || d.frame.height() != info_.height)
        throw FormatError(p + " differs in size from the first frame");
    out = std::move(d.frame);
    ++next_;
    return true;
}

Y4mSource::Y4mSource(const std::string& path) : in_(path, std::ios::binary) {
    if (!in_) throw FormatError("cannot open " + path);
    std::string header;
    std::getline(in_, header);
    std::istringstream hs(header);
    std::string tok;
    hs >> tok;
    if (tok != "YUV4MPEG2") throw FormatError(path + " is not a y4m file");
    std::string colorspace = "420jpeg";
    while (hs >> tok) {
        const char tag = tok[0];
        const std::string v = tok.substr(1);
        if (tag == 'W')
            fmt_.width = std::stoi(v);
        else if (tag == 'H')
            fmt_.height = std::stoi(v);
        else if (tag == 'F') {
            const auto colon = v.find(':');
            if (colon == std::string::npos) throw FormatError(path + ": bad frame rate tag");
            const double num = std::stod(v.substr(0, colon)), den = std::stod(v.substr(colon + 1));
            if (!(den > 0.0)) throw FormatError(path + ": bad frame rate tag");
            fmt_.fps = num / den;
        } else if (tag == 'C')
            colorspace = v;
        else if (tag == 'I' && v != "p" && v != "?")
            throw FormatError(path + ": interlaced y4m is not supported");
        else if (tag == 'X' && v == "COLORRANGE=FULL")
            fmt_.full_range = true;
    }
    check_geometry(fmt_.width, fmt_.height, path);
    if (colorspace.rfind("420", 0) == 0)
        fmt_.chroma = Chroma::c420;
    else if (colorspace.rfind("422", 0) == 0)
        fmt_.chroma = Chroma::c422;
    else if (colorspace.rfind("444", 0) == 0)
        fmt_.chroma = Chroma::c444;
    else
        throw FormatError(path + ": unsupported y4m colorspace C" + colorspace);
    if (const auto p = colorspace.find('p'); p != std::string::npos && colorspace.size() > p + 1 &&
                                             std::isdigit(static_cast<unsigned char>(colorspace[p + 1])))
        fmt_.bit_depth = std::stoi(colorspace.substr(p + 1));
    info_.width = fmt_.width;
    info_.height = fmt_.height;
    info_.fps = fmt_.fps;
    info_.name = path;
    buf_.resize(fmt_.frame_bytes());
    // Frame count from the file size when every frame header is the bare "FRAME\n".
    const auto here = in_.tellg();
    const auto size = std::filesystem::file_size(path);
    const std::size_t per = buf_.size() + 6;
    const std::size_t body = size - static_cast<std::size_t>(here);
    if (body % per == 0) info_.frames = static_cast<int>(body / per);
}

bool Y4mSource::read(Frame& out) {
    std::string line;
    if (!std::getline(in_, line)) return false;
    if (line.rfind("FRAME", 0) != 0) throw FormatError(info_.name + ": missing FRAME marker");
    if (!in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(buf_.size())))
        throw FormatError(info_.name + ": truncated frame");
    out = decode_planar(buf_.data(), fmt_);
    return true;
}

RawSource::RawSource(const std::string& path, RawFormat fmt) : in_(path, std::ios::binary), fmt_(fmt) {
    if (!in_) throw FormatError("cannot open " + path);
    info_.width = fmt_.width;
    info_.height = fmt_.height;
    info_.fps = fmt_.fps;
    info_.encoding = float_samples(fmt_) ? display::InputEncoding::absolute_linear : display::InputEncoding::display_encoded;
    info_.name = path;
    buf_.resize(fmt_.frame_bytes());
    const auto size = std::filesystem::file_size(path);
    if (size % buf_.size() != 0) throw FormatError(path + ": size is not a whole number of frames");
    info_.frames = static_cast<int>(size / buf_.size());
}

bool RawSource::read(Frame& out) {
    if (!in_.read(reinterpret_cast<char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()))) return false;
    out = decode_planar(buf_.data(), fmt_);
    return true;
}

Y4mWriter::Y4mWriter(const std::string& path, int width, int height, double fps, Chroma chroma, int bit_depth)
    : out_(path, std::ios::binary) {
    if (!out_) throw Error("cannot write " + path);
    if (bit_depth != 8 && bit_depth != 10 && bit_depth != 12 && bit_depth != 16)
        throw ConfigError("y4m bit depth must be 8, 10, 12 or 16");
    fmt_.width = width;
    fmt_.height = height;
    fmt_.fps = fps;
    fmt_.chroma = chroma;
    fmt_.bit_depth = bit_depth;
    buf_.resize(fmt_.frame_bytes());
    // Rational frame rate with millihertz precision.
    const long num = std::lround(fps * 1000.0);
    long a = num, b = 1000;
    while (b) {
        const long t = a % b;
        a = b;
        b = t;
    }
    out_ << "YUV4MPEG2 W" << width << " H" << height << " F" << num / a << ':' << 1000 / a << " Ip A1:1 C"
         << chroma_name(chroma);
    if (bit_depth > 8) out_ << 'p' << bit_depth;
    out_ << '\n';
}

void Y4mWriter::write(const Frame& rgb) {
    encode_planar(rgb, fmt_, buf_.data());
    out_ << "FRAME\n";
    out_.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out_) throw Error("y4m write failed");
}

RawWriter::RawWriter(const std::string& path, RawFormat fmt) : out_(path, std::ios::binary), fmt_(fmt) {
    if (!out_) throw Error("cannot write " + path);
    buf_.resize(fmt_.frame_bytes());
    write_sidecar(path + ".json", fmt_);
}

void RawWriter::write(const Frame& frame) {
    encode_planar(frame, fmt_, buf_.data());
    out_.write(reinterpret_cast<const char*>(buf_.data()), static_cast<std::streamsize>(buf_.size()));
    if (!out_) throw Error("raw write failed");
}

struct PrefetchSource::State {
    std::unique_ptr<FrameSource> inner;
    std::size_t capacity;
    std::mutex m;
    std::condition_variable cv;
    std::deque<Frame> queue;
    bool done = false;
    bool stop = false;
    std::exception_ptr error;
    std::thread worker;
};

PrefetchSource::PrefetchSource(std::unique_ptr<FrameSource> inner, std::size_t capacity)
    : state_(std::make_unique<State>()) {
    state_->inner = std::move(inner);
    state_->capacity = std::max<std::size_t>(1, capacity);
    State* s = state_.get();
    s->worker = std::thread([s] {
        try {
            for (;;) {
                Frame f;
                const bool more = s->inner->read(f);
                std::unique_lock lock(s->m);
                if (!more) break;
                s->cv.wait(lock, [s] { return s->stop || s->queue.size() < s->capacity; });
                if (s->stop) break;
                s->queue.push_back(std::move(f));
                s->cv.notify_all();
            }
        } catch (...) {
            std::lock_guard lock(s->m);
            s->error = std::current_exception();
        }
        std::lock_guard lock(s->m);
        s->done = true;
        s->cv.notify_all();
    });
}

PrefetchSource::~PrefetchSource() {
    {
        std::lock_guard lock(state_->m);
        state_->stop = true;
    }
    state_->cv.notify_all();
    if (state_->worker.joinable()) state_->worker.join();
}

const SourceInfo& PrefetchSource::info() const { return state_->inner->info(); }

bool PrefetchSource::read(Frame& out) {
    State* s = state_.get();
    std::unique_lock lock(s->m);
    s->cv.wait(lock, [s] { return !s->queue.empty() || s->done; });
    if (!s->queue.empty()) {
        out = std::move(s->queue.front());
        s->queue.pop_front();
        s->cv.notify_all();
        return true;
    }
    if (s->error) std::rethrow_exception(s->error);
    return false;
}

std::unique_ptr<FrameSource> open_source(const std::string& path, const OpenOptions& options) {
    std::unique_ptr<FrameSource> src;
    const std::string e = lower_ext(path);
    if (path.find('%') != std::string::npos) {
        src = std::make_unique<SequenceSource>(path, options.fps);
    } else if (e == ".png" || e == ".exr") {
        return std::make_unique<ImageSource>(path);
    } else if (e == ".y4m") {
        src = std::make_unique<Y4mSource>(path);
    } else if (e == ".yuv" || e == ".rgb" || e == ".raw") {
        RawFormat fmt = read_sidecar(path + ".json");
        if (options.fps > 0.0) fmt.fps = options.fps;
        src = std::make_unique<RawSource>(path, fmt);
    } else {
        throw FormatError("unsupported input '" + path + "' (png, exr, y4m, yuv/rgb/raw + .json sidecar, or a %d pattern)");
    }
    if (!options.prefetch) return src;
    const double fps = src->info().fps > 0.0 ? src->info().fps : 30.0;
    const auto cap = static_cast<std::size_t>(std::ceil(options.prefetch_seconds * fps));
    return std::make_unique<PrefetchSource>(std::move(src), cap);
}

void write_media(const std::string& path, const Video& frames, double fps) {
    if (frames.empty()) throw FormatError("nothing to write to " + path);
    const std::string e = lower_ext(path);
    if (path.find('%') != std::string::npos) {
        std::vector<char> buf(path.size() + 32);
        for (std::size_t i = 0; i < frames.size(); ++i) {
            std::snprintf(buf.data(), buf.size(), path.c_str(), static_cast<int>(i));
            write_png(buf.data(), frames[i], 16);
        }
    } else if (e == ".png" || e == ".exr") {
        if (frames.size() != 1) throw FormatError(path + ": image formats hold one frame, got " + std::to_string(frames.size()));
        if (e == ".png")
            write_png(path, frames[0], 16);
        else
            write_exr(path, frames[0]);
    } else if (e == ".y4m") {
        if (!(fps > 0.0)) throw FormatError("y4m output needs fps > 0");
        Y4mWriter w(path, frames[0].width(), frames[0].height(), fps);
        for (const auto& f : frames) w.write(f);
    } else if (e == ".rgb" || e == ".raw") {
        RawFormat fmt;
        fmt.width = frames[0].width();
        fmt.height = frames[0].height();
        fmt.fps = fps;
        fmt.rgb = true;
        fmt.bit_depth = 16;
        RawWriter w(path, fmt);
        for (const auto& f : frames) w.write(f);
    } else {
        throw FormatError("unsupported output '" + path + "' (png, exr, y4m, rgb/raw, or a %d pattern)");
    }
}

}  // namespace cvvdp::io
