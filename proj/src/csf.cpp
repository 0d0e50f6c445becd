#include "cvvdp/csf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <map>
#include <sstream>

#include "cvvdp/color_space.hpp"
#include "cvvdp/error.hpp"

namespace cvvdp::csf {

namespace {

using nlohmann::json;

json ecc_json(const EccentricityParams& e) {
    return {{"e1", e.e1}, {"e2", e.e2}, {"e1_nasal", e.e1_nasal}, {"e2_nasal", e.e2_nasal}};
}

EccentricityParams ecc_from(const json& j, EccentricityParams e) {
    e.e1 = j.value("e1", e.e1);
    e.e2 = j.value("e2", e.e2);
    e.e1_nasal = j.value("e1_nasal", e.e1_nasal);
    e.e2_nasal = j.value("e2_nasal", e.e2_nasal);
    return e;
}

json chrom_json(const ChromaticParams& p) {
    return {{"b_S", p.b_S},       {"a0", p.a0},       {"rho0", p.rho0},
            {"beta_S", p.beta_S}, {"sigma_S", p.sigma_S}, {"s1_S", p.s1_S},
            {"s2_S", p.s2_S},     {"s3_S", p.s3_S},   {"rho_S", p.rho_S},
            {"eccentricity", ecc_json(p.ecc)}};
}

ChromaticParams chrom_from(const json& j, ChromaticParams p) {
    p.b_S = j.value("b_S", p.b_S);
    p.a0 = j.value("a0", p.a0);
    p.rho0 = j.value("rho0", p.rho0);
    p.beta_S = j.value("beta_S", p.beta_S);
    p.sigma_S = j.value("sigma_S", p.sigma_S);
    p.s1_S = j.value("s1_S", p.s1_S);
    p.s2_S = j.value("s2_S", p.s2_S);
    p.s3_S = j.value("s3_S", p.s3_S);
    p.rho_S = j.value("rho_S", p.rho_S);
    if (j.contains("eccentricity")) p.ecc = ecc_from(j.at("eccentricity"), p.ecc);
    return p;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace

void CastleCsfParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("castle CSF: ") + name + " must be > 0");
    };
    positive(ach.sigma_S, "ach.sigma_S");
    positive(ach.sigma_T, "ach.sigma_T");
    positive(rg.sigma_S, "rg.sigma_S");
    positive(yv.sigma_S, "yv.sigma_S");
    positive(ach.a0, "ach.a0");
    positive(rg.a0, "rg.a0");
    positive(yv.a0, "yv.a0");
    positive(ach.rho_T, "ach.rho_T");
    positive(rg.rho_S, "rg.rho_S");
    positive(yv.rho_S, "yv.rho_S");
}

json CastleCsfParams::to_json() const {
    const auto& a = ach;
    return {{"ach",
             {{"a_S", a.a_S},       {"b_S", a.b_S},       {"a_T", a.a_T},       {"b_T", a.b_T},
              {"a0", a.a0},         {"rho0", a.rho0},     {"beta_S", a.beta_S}, {"sigma_S", a.sigma_S},
              {"beta_T", a.beta_T}, {"sigma_T", a.sigma_T}, {"omega0", a.omega0}, {"s1_S", a.s1_S},
              {"s2_S", a.s2_S},     {"s3_S", a.s3_S},     {"s4_S", a.s4_S},     {"s5_S", a.s5_S},
              {"rho1_S", a.rho1_S}, {"rho2_S", a.rho2_S}, {"rho3_S", a.rho3_S}, {"s1_T", a.s1_T},
              {"s2_T", a.s2_T},     {"rho_T", a.rho_T},   {"eccentricity", ecc_json(a.ecc)}}},
            {"rg", chrom_json(rg)},
            {"yv", chrom_json(yv)}};
}

CastleCsfParams CastleCsfParams::from_json(const json& j) {
    CastleCsfParams p;
    try {
        if (j.contains("ach")) {
            const auto& a = j.at("ach");
            auto& o = p.ach;
            o.a_S = a.value("a_S", o.a_S);
            o.b_S = a.value("b_S", o.b_S);
            o.a_T = a.value("a_T", o.a_T);
            o.b_T = a.value("b_T", o.b_T);
            o.a0 = a.value("a0", o.a0);
            o.rho0 = a.value("rho0", o.rho0);
            o.beta_S = a.value("beta_S", o.beta_S);
            o.sigma_S = a.value("sigma_S", o.sigma_S);
            o.beta_T = a.value("beta_T", o.beta_T);
            o.sigma_T = a.value("sigma_T", o.sigma_T);
            o.omega0 = a.value("omega0", o.omega0);
            o.s1_S = a.value("s1_S", o.s1_S);
            o.s2_S = a.value("s2_S", o.s2_S);
            o.s3_S = a.value("s3_S", o.s3_S);
            o.s4_S = a.value("s4_S", o.s4_S);
            o.s5_S = a.value("s5_S", o.s5_S);
            o.rho1_S = a.value("rho1_S", o.rho1_S);
            o.rho2_S = a.value("rho2_S", o.rho2_S);
            o.rho3_S = a.value("rho3_S", o.rho3_S);
            o.s1_T = a.value("s1_T", o.s1_T);
            o.s2_T = a.value("s2_T", o.s2_T);
            o.rho_T = a.value("rho_T", o.rho_T);
            if (a.contains("eccentricity")) o.ecc = ecc_from(a.at("eccentricity"), o.ecc);
        }
        if (j.contains("rg")) p.rg = chrom_from(j.at("rg"), p.rg);
        if (j.contains("yv")) p.yv = chrom_from(j.at("yv"), p.yv);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("castle CSF parameters: ") + e.what());
    }
    p.validate();
    return p;
}

CastleCsfParams CastleCsfParams::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return from_json(j);
}

std::uint64_t CastleCsfParams::hash() const { return fnv1a(to_json().dump()); }

double log_parabola(double rho, double rho_m, double b) {
    const double d = std::log10(rho) - std::log10(rho_m);
    return std::pow(10.0, -d * d / std::exp2(b));
}

double truncated_log_parabola_ach(double rho, double rho_m, double a, double b) {
    const double s = log_parabola(rho, rho_m, b);
    if (rho < rho_m && s < 1.0 - a) return 1.0 - a;
    return s;
}

double truncated_log_parabola_chrom(double rho, double rho_m, double b) {
    return rho < rho_m ? 1.0 : log_parabola(rho, rho_m, b);
}

double sustained_response(double omega, double beta, double sigma) {
    return std::exp(-std::pow(omega, beta) / sigma);
}

double transient_response(double omega, double beta, double sigma, double omega0) {
    const double d = std::pow(omega, beta) - std::pow(omega0, beta);
    return std::exp(-d * d / sigma);
}

double critical_area(double rho, double a0, double rho0) {
    const double r = rho / rho0;
    return a0 / (1.0 + r * r);
}

double area_sensitivity(double rho, double area, double a0, double rho0) {
    const double ax = critical_area(rho, a0, rho0);
    return rho * std::sqrt(ax / (1.0 + ax / area));
}

double eccentricity_factor(double ecc, double rho, const EccentricityParams& p, double theta) {
    const double alpha = std::min(1.0, std::abs((theta - 180.0) / 90.0));
    const double e1 = alpha * p.e1 + (1.0 - alpha) * p.e1_nasal;
    const double e2 = alpha * p.e2 + (1.0 - alpha) * p.e2_nasal;
    return std::pow(10.0, e1 * rho * ecc + e2 * ecc);
}

double ach_sustained_peak_sensitivity(const AchromaticParams& p, double L) {
    // (1 - (1 + s4/L)^-s5) written with expm1/log1p: s5 is ~1e10.
    const double high = -std::expm1(-p.s5_S * std::log1p(p.s4_S / L));
    return p.s1_S * std::pow(1.0 + p.s2_S / L, -p.s3_S) * high;
}

double ach_transient_peak_sensitivity(const AchromaticParams& p, double L) { return p.s2_T * std::pow(L, p.s1_T); }

double ach_sustained_peak_frequency(const AchromaticParams& p, double L) {
    return p.rho1_S * std::pow(1.0 + p.rho2_S / L, -p.rho3_S);
}

double chrom_peak_sensitivity(const ChromaticParams& p, double L) {
    return p.s1_S * std::pow(1.0 + p.s2_S / L, -p.s3_S);
}

CastleCsf::CastleCsf(CastleCsfParams params) : params_(params) { params_.validate(); }

double CastleCsf::mechanism_sensitivity(Mechanism m, double rho, double omega, double L, double area, double ecc,
                                        double theta) const {
    if (!(rho > 0.0) || !(L > 0.0) || !(area > 0.0) || !(ecc >= 0.0) || !(omega >= 0.0) ||
        !std::isfinite(rho) || !std::isfinite(L))
        throw DomainError("castle CSF evaluated outside its domain");
    if (m == Mechanism::ach) {
        const auto& p = params_.ach;
        const double s_area = area_sensitivity(rho, area, p.a0, p.rho0);
        const double sus = ach_sustained_peak_sensitivity(p, L) * s_area *
                           truncated_log_parabola_ach(rho, ach_sustained_peak_frequency(p, L), p.a_S, p.b_S);
        const double tra = ach_transient_peak_sensitivity(p, L) * s_area *
                           truncated_log_parabola_ach(rho, p.rho_T, p.a_T, p.b_T);
        const double r_s = sustained_response(omega, p.beta_S, p.sigma_S);
        const double r_t = transient_response(omega, p.beta_T, p.sigma_T, p.omega0);
        return eccentricity_factor(ecc, rho, p.ecc, theta) * (r_s * sus + r_t * tra);
    }
    const auto& p = m == Mechanism::rg ? params_.rg : params_.yv;
    const double sal = chrom_peak_sensitivity(p, L) * area_sensitivity(rho, area, p.a0, p.rho0) *
                       truncated_log_parabola_chrom(rho, p.rho_S, p.b_S);
    return eccentricity_factor(ecc, rho, p.ecc, theta) * sustained_response(omega, p.beta_S, p.sigma_S) * sal;
}

Vec3 background_lms(double L) {
    const Vec3& a = color::kAdaptingLms;
    const double k = L / (a[0] + a[1]);
    return {a[0] * k, a[1] * k, a[2] * k};
}

double cone_contrast(const Vec3& dkl_contrast, double L) {
    static const Mat3 inv = inverse(color::lms_to_dkl_matrix());
    const Vec3 inc = mul(inv, Vec3{dkl_contrast[0] * L, dkl_contrast[1] * L, dkl_contrast[2] * L});
    const Vec3 bkg = background_lms(L);
    double s = 0.0;
    for (int i = 0; i < 3; ++i) s += (inc[i] / bkg[i]) * (inc[i] / bkg[i]);
    return std::sqrt(s / 3.0);
}

ThresholdResult CastleCsf::contrast_energy_threshold(const Vec3& direction, double rho, double omega, double L,
                                                     double area, double ecc) const {
    if (direction[0] == 0.0 && direction[1] == 0.0 && direction[2] == 0.0)
        throw DomainError("contrast threshold needs a nonzero direction");
    const std::array<Mechanism, 3> mech{Mechanism::ach, Mechanism::rg, Mechanism::yv};
    double e2 = 0.0;
    for (int c = 0; c < 3; ++c) {
        const double s = mechanism_sensitivity(mech[c], rho, omega, L, area, ecc) * direction[c];
        e2 += s * s;
    }
    ThresholdResult r;
    r.energy = std::sqrt(e2);
    for (int c = 0; c < 3; ++c) r.dkl_contrast[c] = direction[c] / r.energy;
    static const Mat3 inv = inverse(color::lms_to_dkl_matrix());
    r.lms_increment = mul(inv, Vec3{r.dkl_contrast[0] * L, r.dkl_contrast[1] * L, r.dkl_contrast[2] * L});
    r.cone_sensitivity = 1.0 / cone_contrast(r.dkl_contrast, L);
    return r;
}

double CastleCsf::dkl_sensitivity(VisualChannel ch, double rho, double L) const {
    const int axis = ch == VisualChannel::rg ? 1 : (ch == VisualChannel::yv ? 2 : 0);
    const double omega = kChannelOmega[index(ch)];
    Vec3 dir{0.0, 0.0, 0.0};
    dir[axis] = 1.0;
    const double s_cc = contrast_energy_threshold(dir, rho, omega, L, kMetricArea, kMetricEcc).cone_sensitivity;
    const double target = 1.0 / s_cc;

    auto residual = [&](double log_c) {
        Vec3 c{0.0, 0.0, 0.0};
        c[axis] = std::pow(10.0, log_c);
        return std::log10(cone_contrast(c, L)) - std::log10(target);
    };

    double lo = -6.0, hi = 1.0;
    while (residual(lo) > 0.0 && lo > -15.0) lo -= 1.0;
    while (residual(hi) < 0.0 && hi < 15.0) hi += 1.0;
    if (residual(lo) > 0.0 || residual(hi) < 0.0) {
        std::ostringstream msg;
        msg << "DKL sensitivity root not bracketed: channel " << kChannelLabels[index(ch)] << " rho=" << rho
            << " L=" << L << " S_cc=" << s_cc;
        throw NumericalError(msg.str());
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double r = residual(mid);
        if (std::abs(r) < 1e-12 || hi - lo < 1e-14) {
            lo = hi = mid;
            break;
        }
        if (r < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 1.0 / std::pow(10.0, 0.5 * (lo + hi));
}

CsfLut::CsfLut(std::array<LutTable, kNumChannels> tables, std::uint64_t params_hash)
    : tables_(std::move(tables)), params_hash_(params_hash) {
    for (auto& t : tables_) {
        if (t.log_L.size() < 2 || t.log_rho.size() < 2 || t.S.size() != t.log_L.size() * t.log_rho.size())
            throw FormatError("CSF LUT: inconsistent table dimensions");
        for (std::size_t i = 1; i < t.log_L.size(); ++i)
            if (!(t.log_L[i] > t.log_L[i - 1])) throw FormatError("CSF LUT: luminance grid not increasing");
        for (std::size_t i = 1; i < t.log_rho.size(); ++i)
            if (!(t.log_rho[i] > t.log_rho[i - 1])) throw FormatError("CSF LUT: frequency grid not increasing");
        t.log_S.resize(t.S.size());
        for (std::size_t i = 0; i < t.S.size(); ++i) {
            if (!(t.S[i] > 0.0f) || !std::isfinite(t.S[i])) throw FormatError("CSF LUT: non-positive entry");
            t.log_S[i] = std::log10(t.S[i]);
        }
    }
}

namespace {

// Index and fraction of x on an increasing axis, clamped to the ends.
std::pair<std::size_t, double> locate(const std::vector<double>& axis, double x) {
    if (x <= axis.front()) return {0, 0.0};
    if (x >= axis.back()) return {axis.size() - 2, 1.0};
    const auto it = std::upper_bound(axis.begin(), axis.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - axis.begin()) - 1;
    return {i, (x - axis[i]) / (axis[i + 1] - axis[i])};
}

}  // namespace

double CsfLut::lookup_log10(VisualChannel ch, double log10_L, double log10_rho) const {
    const LutTable& t = tables_[index(ch)];
    const auto [i, fi] = locate(t.log_L, log10_L);
    const auto [j, fj] = locate(t.log_rho, log10_rho);
    const std::size_t n = t.log_rho.size();
    // Exact node values when a fraction is 0 or 1 avoid float round-off.
    auto at = [&](std::size_t a, std::size_t b) { return static_cast<double>(t.log_S[a * n + b]); };
    const double v0 = fj == 0.0 ? at(i, j) : (fj == 1.0 ? at(i, j + 1) : at(i, j) * (1 - fj) + at(i, j + 1) * fj);
    if (fi == 0.0) return v0;
    const double v1 =
        fj == 0.0 ? at(i + 1, j) : (fj == 1.0 ? at(i + 1, j + 1) : at(i + 1, j) * (1 - fj) + at(i + 1, j + 1) * fj);
    if (fi == 1.0) return v1;
    return v0 * (1 - fi) + v1 * fi;
}

double CsfLut::lookup(VisualChannel ch, double L, double rho) const {
    const LutTable& t = tables_[index(ch)];
    const auto [i, fi] = locate(t.log_L, std::log10(L));
    const auto [j, fj] = locate(t.log_rho, std::log10(rho));
    const std::size_t n = t.log_rho.size();
    const std::size_t ii = fi == 1.0 ? i + 1 : i;
    const std::size_t jj = fj == 1.0 ? j + 1 : j;
    if ((fi == 0.0 || fi == 1.0) && (fj == 0.0 || fj == 1.0)) return t.S[ii * n + jj];
    return std::pow(10.0, lookup_log10(ch, std::log10(L), std::log10(rho)));
}

namespace {

constexpr char kMagic[8] = {'C', 'V', 'V', 'D', 'P', 'L', 'U', 'T'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T v) {
    static_assert(std::endian::native == std::endian::little, "LUT I/O assumes a little-endian host");
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw FormatError("CSF LUT: truncated file");
    return v;
}

}  // namespace

void CsfLut::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out.write(kMagic, sizeof kMagic);
    put<std::uint32_t>(out, kVersion);
    put<std::uint32_t>(out, kNumChannels);
    put<std::uint64_t>(out, params_hash_);
    for (const auto& t : tables_) {
        put<double>(out, t.omega);
        put<std::uint32_t>(out, static_cast<std::uint32_t>(t.log_L.size()));
        put<std::uint32_t>(out, static_cast<std::uint32_t>(t.log_rho.size()));
        for (double v : t.log_L) put<double>(out, v);
        for (double v : t.log_rho) put<double>(out, v);
        for (float v : t.S) put<float>(out, v);
    }
    if (!out) throw Error("error writing " + path);
}

CsfLut CsfLut::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open LUT file " + path);
    char magic[8];
    if (!in.read(magic, sizeof magic) || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw FormatError(path + ": not a CSF LUT file");
    if (get<std::uint32_t>(in) != kVersion) throw FormatError(path + ": unsupported LUT version");
    if (get<std::uint32_t>(in) != kNumChannels) throw FormatError(path + ": wrong channel count");
    const auto hash = get<std::uint64_t>(in);
    std::array<LutTable, kNumChannels> tables;
    for (auto& t : tables) {
        t.omega = get<double>(in);
        const auto nl = get<std::uint32_t>(in);
        const auto nr = get<std::uint32_t>(in);
        if (nl < 2 || nr < 2 || nl > 4096 || nr > 4096) throw FormatError(path + ": bad LUT dimensions");
        t.log_L.resize(nl);
        t.log_rho.resize(nr);
        t.S.resize(static_cast<std::size_t>(nl) * nr);
        for (auto& v : t.log_L) v = get<double>(in);
        for (auto& v : t.log_rho) v = get<double>(in);
        for (auto& v : t.S) v = get<float>(in);
    }
    return CsfLut(std::move(tables), hash);
}

void CsfLut::export_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << "channel,omega_hz,L_cd_m2,rho_cpd,S\n";
    out.precision(9);
    for (int c = 0; c < kNumChannels; ++c) {
        const auto& t = tables_[c];
        for (std::size_t i = 0; i < t.log_L.size(); ++i)
            for (std::size_t j = 0; j < t.log_rho.size(); ++j)
                out << kChannelLabels[c] << ',' << t.omega << ',' << std::pow(10.0, t.log_L[i]) << ','
                    << std::pow(10.0, t.log_rho[j]) << ',' << t.value(i, j) << '\n';
    }
}

CsfLut build_lut(const CastleCsf& model, int nodes_L, int nodes_rho) {
    if (nodes_L < 2 || nodes_rho < 2) throw ConfigError("LUT needs at least 2 nodes per axis");
    std::array<LutTable, kNumChannels> tables;
    const double lr0 = std::log10(CsfLut::kRhoMin), lr1 = std::log10(CsfLut::kRhoMax);
    for (int c = 0; c < kNumChannels; ++c) {
        auto& t = tables[c];
        t.omega = kChannelOmega[c];
        t.log_L.resize(nodes_L);
        t.log_rho.resize(nodes_rho);
        for (int i = 0; i < nodes_L; ++i)
            t.log_L[i] = CsfLut::kLogLMin + (CsfLut::kLogLMax - CsfLut::kLogLMin) * i / (nodes_L - 1);
        for (int j = 0; j < nodes_rho; ++j) t.log_rho[j] = lr0 + (lr1 - lr0) * j / (nodes_rho - 1);
        t.S.resize(static_cast<std::size_t>(nodes_L) * nodes_rho);
        for (int i = 0; i < nodes_L; ++i)
            for (int j = 0; j < nodes_rho; ++j)
                t.S[static_cast<std::size_t>(i) * nodes_rho + j] = static_cast<float>(model.dkl_sensitivity(
                    static_cast<VisualChannel>(c), std::pow(10.0, t.log_rho[j]), std::pow(10.0, t.log_L[i])));
    }
    return CsfLut(std::move(tables), model.params().hash());
}

std::string default_cache_dir() {
    if (const char* env = std::getenv("CVVDP_CACHE_DIR"); env && *env) return env;
    if (const char* xdg = std::getenv("XDG_CACHE_HOME"); xdg && *xdg) return std::string(xdg) + "/cvvdp";
    if (const char* home = std::getenv("HOME"); home && *home) return std::string(home) + "/.cache/cvvdp";
    return "";
}

std::shared_ptr<const CsfLut> cached_lut(const CastleCsfParams& params, const std::string& cache_dir) {
    static std::mutex mutex;
    static std::map<std::uint64_t, std::shared_ptr<const CsfLut>> memo;
    const std::uint64_t h = params.hash();
    std::lock_guard lock(mutex);
    if (auto it = memo.find(h); it != memo.end()) return it->second;

    const std::string dir = cache_dir.empty() ? default_cache_dir() : cache_dir;
    std::string file;
    if (!dir.empty()) {
        std::ostringstream name;
        name << dir << "/castle_csf_" << std::hex << h << ".lut";
        file = name.str();
        std::error_code ec;
        if (std::filesystem::exists(file, ec)) {
            try {
                auto lut = std::make_shared<const CsfLut>(CsfLut::load(file));
                if (lut->params_hash() == h) {
                    memo[h] = lut;
                    return lut;
                }
            } catch (const Error&) {
                // rebuilt below
            }
        }
    }
    auto lut = std::make_shared<const CsfLut>(build_lut(CastleCsf(params)));
    if (!file.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        const std::string tmp = file + ".tmp" + std::to_string(reinterpret_cast<std::uintptr_t>(lut.get()));
        try {
            lut->save(tmp);
            std::filesystem::rename(tmp, file, ec);
        } catch (const Error&) {
            std::filesystem::remove(tmp, ec);
        }
    }
    memo[h] = lut;
    return lut;
}

BandSensitivity::BandSensitivity(const CsfLut& lut, VisualChannel ch, double rho) {
    const auto& t = lut.table(ch);
    const std::size_t n = t.log_L.size();
    const double step = (t.log_L.back() - t.log_L.front()) / (n - 1);
    bool uniform = true;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(t.log_L[i] - (t.log_L.front() + step * i)) > 1e-9 * std::max(1.0, std::abs(step))) uniform = false;
    const std::size_t m = uniform ? n : 1024;
    const double mstep = (t.log_L.back() - t.log_L.front()) / (m - 1);
    log_L0_ = static_cast<float>(t.log_L.front());
    inv_step_ = static_cast<float>(1.0 / mstep);
    n_ = static_cast<int>(m);
    log_S_.resize(m + 1);
    const double lr = std::log10(rho);
    for (std::size_t i = 0; i < m; ++i) {
        const double ll = uniform ? t.log_L[i] : t.log_L.front() + mstep * i;
        log_S_[i] = static_cast<float>(lut.lookup_log10(ch, ll, lr));
    }
    log_S_[m] = log_S_[m - 1];
}

float BandSensitivity::log10_at(float log10_L) const {
    float x = (log10_L - log_L0_) * inv_step_;
    x = std::clamp(x, 0.0f, static_cast<float>(n_ - 1));
    const int i = std::min(static_cast<int>(x), n_ - 2);
    const float f = x - static_cast<float>(i);
    return log_S_[i] + f * (log_S_[i + 1] - log_S_[i]);
}

float BandSensitivity::operator()(float L) const {
    return std::exp2(3.3219280948873623f * log10_at(std::log10(std::max(L, 1e-12f))));
}

}  // namespace cvvdp::csf
