#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cvvdp/content.hpp"
#include "cvvdp/csf.hpp"
#include "cvvdp/diagnostics.hpp"
#include "cvvdp/display.hpp"
#include "cvvdp/distortions.hpp"
#include "cvvdp/error.hpp"
#include "cvvdp/io.hpp"
#include "cvvdp/metric.hpp"
#include "cvvdp/params.hpp"
#include "cvvdp/report.hpp"
#include "cvvdp/visualization.hpp"

namespace fs = std::filesystem;
using namespace cvvdp;

namespace {

struct DisplayOptions {
    std::string name = "sdr_office";
    std::string config = std::string(CVVDP_CONFIG_DIR) + "/displays.json";
    std::optional<double> ppd;
    std::optional<double> peak;
    std::optional<double> black;
    std::optional<double> ambient;

    void add(CLI::App* app) {
        app->add_option("--display", name, "Display preset name")->capture_default_str();
        app->add_option("--display-config", config, "Display presets file (JSON)")->capture_default_str();
        app->add_option("--ppd", ppd, "Pixels per degree, overrides the display geometry");
        app->add_option("--peak-luminance", peak, "Override peak luminance, cd/m^2");
        app->add_option("--black-level", black, "Override black level, cd/m^2");
        app->add_option("--ambient", ambient, "Override ambient illuminance, lux");
    }

    display::DisplaySpec resolve() const {
        const std::string cfg = fs::exists(config) ? config : "";
        display::DisplaySpec d = display::find_display(name, cfg);
        if (ppd) d.ppd_override = *ppd;
        if (peak) d.L_peak = *peak;
        if (black) d.L_black = *black;
        if (ambient) d.E_amb = *ambient;
        d.validate();
        return d;
    }
};

struct ModelOptions {
    std::string params;
    std::string csf_params;
    std::string variant;
    std::string cache_dir;

    void add(CLI::App* app) {
        app->add_option("--params", params, "Metric parameter file (JSON); built-in defaults when omitted");
        app->add_option("--csf-params", csf_params, "CSF parameter file (JSON)");
        app->add_option("--variant", variant, "Encoding and masking, e.g. enc=mult,mask=mutual (enc: mult|add, mask: mutual|transducer|similarity)");
        app->add_option("--cache-dir", cache_dir, "CSF lookup table cache (default: $CVVDP_CACHE_DIR or ~/.cache/cvvdp)");
    }

    MetricParams metric_params() const {
        MetricParams p = params.empty() ? MetricParams{} : MetricParams::load(params);
        if (!variant.empty()) apply_variant(p, variant);
        p.validate();
        return p;
    }

    csf::CastleCsfParams csf() const { return csf_params.empty() ? csf::CastleCsfParams{} : csf::CastleCsfParams::load(csf_params); }

    Metric make(const display::DisplaySpec& d) const {
        const auto cp = csf();
        return Metric(d, metric_params(), cp, csf::cached_lut(cp, cache_dir));
    }
};

bool is_pattern(const std::string& p) { return p.find('%') != std::string::npos; }

std::string lower_ext(const std::string& p) {
    std::string e = fs::path(p).extension().string();
    for (auto& c : e) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return e;
}

// Streams heatmap frames to PNG (image or %d pattern) or y4m.
class HeatmapWriter {
public:
    HeatmapWriter(std::string path, double fps, viz::HeatmapStyle style)
        : path_(std::move(path)), fps_(fps), style_(style) {}

    void operator()(int frame, const Frame& test, const Plane& jod) {
        const Frame h = viz::render_heatmap(test, jod, style_);
        if (is_pattern(path_)) {
            std::vector<char> buf(path_.size() + 32);
            std::snprintf(buf.data(), buf.size(), path_.c_str(), frame);
            io::write_png(buf.data(), h, 8);
        } else if (lower_ext(path_) == ".y4m") {
            if (!y4m_) y4m_ = std::make_unique<io::Y4mWriter>(path_, h.width(), h.height(), fps_ > 0.0 ? fps_ : 30.0);
            y4m_->write(h);
        } else {
            if (frame > 0) throw FormatError("heatmap for a video needs a .y4m file or a %d pattern");
            io::write_png(path_, h, 8);
        }
    }

private:
    std::string path_;
    double fps_;
    viz::HeatmapStyle style_;
    std::unique_ptr<io::Y4mWriter> y4m_;
};

int run_score(const std::string& test_path, const std::string& ref_path, double fps, const DisplayOptions& dopt,
              const ModelOptions& mopt, const std::string& heatmap, const std::string& colormap, double jod_range,
              const std::string& distogram, const std::string& report_path, int threads, bool quiet) {
    const auto d = dopt.resolve();
    const Metric metric = mopt.make(d);
    io::OpenOptions oo;
    oo.fps = fps;
    auto test = io::open_source(test_path, oo);
    auto ref = io::open_source(ref_path, oo);

    EvalOptions eo;
    eo.threads = threads;
    std::shared_ptr<HeatmapWriter> hw;
    if (!heatmap.empty()) {
        viz::HeatmapStyle style;
        style.map = viz::parse_colormap(colormap);
        style.jod_range = jod_range;
        hw = std::make_shared<HeatmapWriter>(heatmap, test->info().fps, style);
        eo.heatmap = [hw](int f, const Frame& t, const Plane& j) { (*hw)(f, t, j); };
    }
    const MetricResult r = metric.evaluate(*test, *ref, eo);

    if (!distogram.empty()) {
        const auto dg = viz::make_distogram(r.features);
        if (lower_ext(distogram) == ".svg")
            viz::write_distogram_svg(dg, distogram);
        else
            viz::write_distogram_csv(dg, distogram);
    }
    if (!report_path.empty()) report::write_report(report_path, report::make_report(r, metric));

    if (quiet) {
        std::printf("%.6f\n", r.score.jod);
    } else {
        std::printf("JOD: %.6f\n", r.score.jod);
        std::printf("d_pooled: %.6g\n", r.score.d_pooled);
        std::printf("mode: %s, %dx%d, %d frame(s), ppd %.3f%s\n", r.image_mode ? "image" : "video", r.width, r.height,
                    r.frames, r.ppd, r.image_mode ? "" : (", fps " + std::to_string(r.fps)).c_str());
        if (r.clamped_test || r.clamped_ref)
            std::printf("warning: %zu test and %zu reference values were outside [0,1] and clamped\n", r.clamped_test,
                        r.clamped_ref);
    }
    return 0;
}

Video read_all(const std::string& path, double fps, double* out_fps) {
    io::OpenOptions oo;
    oo.fps = fps;
    oo.prefetch = false;
    auto src = io::open_source(path, oo);
    Video v;
    Frame f;
    while (src->read(f)) v.push_back(f);
    if (out_fps) *out_fps = src->info().fps;
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Full-reference colour image and video quality metric (JOD scale)."};
    app.require_subcommand(1);
    app.footer("Environment: CVVDP_CACHE_DIR sets the CSF lookup table cache directory.");

    // score
    auto* score = app.add_subcommand("score", "Predict quality of a test image/video against a reference");
    std::string test_path, ref_path, heatmap, distogram, report_path, colormap = "viridis";
    double fps = 0.0, jod_range = 2.0;
    int threads = 0;
    bool quiet = false;
    DisplayOptions sdisp;
    ModelOptions smodel;
    score->add_option("--test,-t", test_path, "Test: .png, .exr, .y4m, .yuv/.rgb/.raw (+ .json sidecar) or a %d PNG pattern")->required();
    score->add_option("--ref,-r", ref_path, "Reference, same formats")->required();
    score->add_option("--fps", fps, "Frame rate for PNG sequences or raw files without fps");
    sdisp.add(score);
    smodel.add(score);
    score->add_option("--heatmap", heatmap, "Heatmap output: .png (image), .y4m or a %d PNG pattern (video)");
    score->add_option("--colormap", colormap, "Heatmap colormap: viridis or gray")->capture_default_str();
    score->add_option("--jod-range", jod_range, "JOD drop mapped to the top of the colormap")->capture_default_str();
    score->add_option("--distogram", distogram, "Distogram output, .svg or .csv");
    score->add_option("--report", report_path, "JSON report with per-band features");
    score->add_option("--threads", threads, "Worker threads, 0 = all cores")->capture_default_str();
    score->add_flag("--quiet,-q", quiet, "Print the JOD value only");

    // distort
    auto* dist = app.add_subcommand("distort", "Generate distorted versions of a reference");
    std::vector<std::string> inputs;
    std::string kind = "blur", out_path, corpus_dir, dcfg_path;
    int level = 1;
    std::uint64_t seed = 0;
    double dfps = 0.0;
    DisplayOptions ddisp;
    dist->add_option("--input,-i", inputs, "Reference file(s)")->required();
    dist->add_option("--kind,-k", kind, "dither, lsnu, blur, contrast, wgnu, dce, fringes, chroma_ss")->capture_default_str();
    dist->add_option("--level,-l", level, "Level 1..3 (0 = identity)")->capture_default_str();
    dist->add_option("--seed,-s", seed, "Random seed")->capture_default_str();
    dist->add_option("--out,-o", out_path, "Output file (single distortion)");
    dist->add_option("--corpus", corpus_dir, "Write all kinds x levels for every input plus manifest.csv into this directory");
    dist->add_option("--config", dcfg_path, "Distortion parameter file (JSON)");
    dist->add_option("--fps", dfps, "Frame rate for PNG sequences");
    ddisp.add(dist);

    // diagnose
    auto* diag_cmd = app.add_subcommand("diagnose", "Model diagnostics: self_masking, masking, matching, chroma_ss, all");
    std::string suite = "all", diag_out = "diagnostics", diag_opts;
    DisplayOptions gdisp;
    ModelOptions gmodel;
    diag_cmd->add_option("suite", suite, "Suite name")->capture_default_str();
    diag_cmd->add_option("--out,-o", diag_out, "Output directory for CSV and SVG")->capture_default_str();
    diag_cmd->add_option("--options", diag_opts, "Suite options (JSON file), e.g. the matching config");
    gdisp.add(diag_cmd);
    gmodel.add(diag_cmd);

    // content
    auto* content_cmd = app.add_subcommand("content", "Write synthetic test content");
    std::string content_kind = "landscape", content_out;
    int cw = 1920, ch = 1080, cframes = 50;
    double cfps = 30.0;
    std::uint64_t cseed = 1;
    content_cmd->add_option("kind", content_kind, "landscape, shapes, texture (images) or pan, motion (videos)")->capture_default_str();
    content_cmd->add_option("--out,-o", content_out, "Output file (.png for images; .y4m/.rgb or %d pattern for videos)")->required();
    content_cmd->add_option("--width", cw, "Width")->capture_default_str();
    content_cmd->add_option("--height", ch, "Height")->capture_default_str();
    content_cmd->add_option("--frames", cframes, "Frames (videos)")->capture_default_str();
    content_cmd->add_option("--fps", cfps, "Frame rate (videos)")->capture_default_str();
    content_cmd->add_option("--seed", cseed, "Seed")->capture_default_str();

    // lut
    auto* lut_cmd = app.add_subcommand("lut", "CSF lookup table tools");
    lut_cmd->require_subcommand(1);
    auto* lut_build = lut_cmd->add_subcommand("build", "Build the CSF lookup table (into the cache unless --out)");
    std::string lut_out, lut_csv, lut_params, lut_cache;
    int nodes = csf::CsfLut::kDefaultNodes;
    lut_build->add_option("--out,-o", lut_out, "Output table file");
    lut_build->add_option("--csv", lut_csv, "Also export the table as CSV");
    lut_build->add_option("--csf-params", lut_params, "CSF parameter file (JSON)");
    lut_build->add_option("--nodes", nodes, "Nodes per axis")->capture_default_str();
    lut_build->add_option("--cache-dir", lut_cache, "Cache directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*score)
            return run_score(test_path, ref_path, fps, sdisp, smodel, heatmap, colormap, jod_range, distogram, report_path,
                             threads, quiet);

        if (*dist) {
            const auto d = ddisp.resolve();
            const auto cfg = dcfg_path.empty() ? distort::DistortionConfig{} : distort::DistortionConfig::load(dcfg_path);
            if (!corpus_dir.empty()) {
                const auto rows = distort::generate_corpus(inputs, corpus_dir, d, seed, cfg);
                std::printf("wrote %zu files and manifest.csv to %s\n", rows.size(), corpus_dir.c_str());
            } else {
                if (out_path.empty()) throw ConfigError("distort needs --out or --corpus");
                if (inputs.size() != 1) throw ConfigError("single distortion takes one --input");
                double src_fps = 0.0;
                const Video in = read_all(inputs[0], dfps, &src_fps);
                const distort::DistortionSpec spec{distort::parse_kind(kind), level, seed};
                const Video out = distort::apply(in, spec, display::effective_ppd(d), d, cfg);
                io::write_media(out_path, out, src_fps);
                std::printf("wrote %s (%s, level %d, seed %llu)\n", out_path.c_str(), kind.c_str(), level,
                            static_cast<unsigned long long>(seed));
            }
            return 0;
        }

        if (*diag_cmd) {
            const auto d = gdisp.resolve();
            const Metric metric = gmodel.make(d);
            nlohmann::json o = nlohmann::json::object();
            if (!diag_opts.empty()) {
                std::ifstream in(diag_opts);
                if (!in) throw ConfigError("cannot open " + diag_opts);
                o = nlohmann::json::parse(in);
            }
            std::vector<std::string> suites;
            if (suite == "all")
                suites.assign(diag::kSuites.begin(), diag::kSuites.end());
            else
                suites.push_back(suite);
            for (const auto& s : suites) std::printf("%s\n", diag::run_suite(s, metric, diag_out, o).c_str());
            return 0;
        }

        if (*content_cmd) {
            Video v;
            double out_fps = 0.0;
            if (content_kind == "pan" || content_kind == "motion") {
                v = content::synth_video(content::parse_video_kind(content_kind), cw, ch, cframes, cseed);
                out_fps = cfps;
            } else {
                v.push_back(content::synth_image(content::parse_image_kind(content_kind), cw, ch, cseed));
            }
            io::write_media(content_out, v, out_fps);
            std::printf("wrote %s\n", content_out.c_str());
            return 0;
        }

        if (*lut_build) {
            const auto cp = lut_params.empty() ? csf::CastleCsfParams{} : csf::CastleCsfParams::load(lut_params);
            std::shared_ptr<const csf::CsfLut> lut;
            if (!lut_out.empty() || nodes != csf::CsfLut::kDefaultNodes) {
                lut = std::make_shared<const csf::CsfLut>(csf::build_lut(csf::CastleCsf(cp), nodes, nodes));
                if (!lut_out.empty()) {
                    lut->save(lut_out);
                    std::printf("wrote %s\n", lut_out.c_str());
                }
            } else {
                lut = csf::cached_lut(cp, lut_cache);
                std::printf("cached in %s\n", (lut_cache.empty() ? csf::default_cache_dir() : lut_cache).c_str());
            }
            if (!lut_csv.empty()) lut->export_csv(lut_csv);
            return 0;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
