#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cvvdp/channels.hpp"
#include "cvvdp/mat3.hpp"

namespace cvvdp::csf {

enum class Mechanism { ach, rg, yv };

struct EccentricityParams {
    double e1 = 0.019;
    double e2 = 0.02967;
    double e1_nasal = 0.01939;
    double e2_nasal = 0.01136;
};

struct AchromaticParams {
    // size and spatial frequency
    double a_S = 0.1044;
    double b_S = 0.0002193;
    double a_T = 0.0002733;
    double b_T = 1.751;
    double a0 = 270.0;
    double rho0 = 0.65;
    // temporal channels
    double beta_S = 1.331;
    double sigma_S = 5.7934;
    double beta_T = 0.1898;
    double sigma_T = 0.1231;
    double omega0 = 5.0;
    // luminance
    double s1_S = 68.95;
    double s2_S = 59.50;
    double s3_S = 0.1643;
    double s4_S = 7.548e-7;
    double s5_S = 7.773e9;
    double rho1_S = 1.621;
    double rho2_S = 36.66;
    double rho3_S = 0.2558;
    double s1_T = 0.5008;
    double s2_T = 57.35;
    double rho_T = 0.02675;
    EccentricityParams ecc;
};

struct ChromaticParams {
    double b_S;
    double a0;
    double rho0;
    double beta_S;
    double sigma_S;
    double s1_S;
    double s2_S;
    double s3_S;
    double rho_S;
    EccentricityParams ecc;
};

struct CastleCsfParams {
    AchromaticParams ach;
    ChromaticParams rg{2.8884, 46.7732, 0.6079, 1.1196, 14.1255, 5031.31, 21.3026, 0.47, 0.0005221, {}};
    ChromaticParams yv{2.1122, 3.01318e7, 0.0004953, 0.9479, 6.6366, 93.024, 37.0135, 0.4134, 0.0234, {}};

    void validate() const;
    nlohmann::json to_json() const;
    static CastleCsfParams from_json(const nlohmann::json& j);
    static CastleCsfParams load(const std::string& path);
    // FNV-1a of the canonical JSON dump.
    std::uint64_t hash() const;
};

// Evaluation conditions used by the metric.
inline constexpr double kMetricArea = 3.14159265358979323846 * 1.5 * 1.5;
inline constexpr double kMetricEcc = 0.0;

// Model components. All frequencies in cpd, omega in Hz, L in cd/m^2.
double log_parabola(double rho, double rho_m, double b);
double truncated_log_parabola_ach(double rho, double rho_m, double a, double b);
double truncated_log_parabola_chrom(double rho, double rho_m, double b);
double sustained_response(double omega, double beta, double sigma);
double transient_response(double omega, double beta, double sigma, double omega0);
double critical_area(double rho, double a0, double rho0);
double area_sensitivity(double rho, double area, double a0, double rho0);
double eccentricity_factor(double ecc, double rho, const EccentricityParams& p, double theta = 0.0);

double ach_sustained_peak_sensitivity(const AchromaticParams& p, double L);
double ach_transient_peak_sensitivity(const AchromaticParams& p, double L);
double ach_sustained_peak_frequency(const AchromaticParams& p, double L);
double chrom_peak_sensitivity(const ChromaticParams& p, double L);

// Threshold found by the contrast-energy model for a DKL direction.
struct ThresholdResult {
    Vec3 dkl_contrast;        // threshold mechanism contrasts (increment / L)
    Vec3 lms_increment;       // threshold cone increments
    double energy = 0.0;      // energy of the input direction
    double cone_sensitivity;  // inverse of the sqrt(3)-normalized cone contrast
};

class CastleCsf {
public:
    explicit CastleCsf(CastleCsfParams params = {});

    const CastleCsfParams& params() const { return params_; }

    // Sensitivity of one mechanism for mechanism-contrast units.
    double mechanism_sensitivity(Mechanism m, double rho, double omega, double L, double area,
                                 double ecc, double theta = 0.0) const;

    ThresholdResult contrast_energy_threshold(const Vec3& direction, double rho, double omega, double L,
                                              double area, double ecc) const;

    // Cone-contrast sensitivity converted to DKL contrast of a cardinal
    // direction, by bisection on log10 C.
    double dkl_sensitivity(VisualChannel ch, double rho, double L) const;

private:
    CastleCsfParams params_;
};

// Background cone responses for luminance L (adapting chromaticity).
Vec3 background_lms(double L);
// sqrt(3)-normalized cone contrast of a DKL contrast vector on background L.
double cone_contrast(const Vec3& dkl_contrast, double L);

struct LutTable {
    std::vector<double> log_L;    // strictly increasing
    std::vector<double> log_rho;  // strictly increasing
    std::vector<float> S;         // row-major [L][rho]
    std::vector<float> log_S;
    double omega = 0.0;

    double value(std::size_t i, std::size_t j) const { return S[i * log_rho.size() + j]; }
};

class CsfLut {
public:
    static constexpr double kLogLMin = -3.0;
    static constexpr double kLogLMax = 4.0;
    static constexpr double kRhoMin = 0.125;
    static constexpr double kRhoMax = 64.0;
    static constexpr int kDefaultNodes = 64;

    CsfLut() = default;
    explicit CsfLut(std::array<LutTable, kNumChannels> tables, std::uint64_t params_hash = 0);

    // Bilinear interpolation of log10 S on (log10 L, log10 rho); clamps
    // inputs to the grid.
    double lookup(VisualChannel ch, double L, double rho) const;
    double lookup_log10(VisualChannel ch, double log10_L, double log10_rho) const;

    const LutTable& table(VisualChannel ch) const { return tables_[index(ch)]; }
    std::uint64_t params_hash() const { return params_hash_; }

    void save(const std::string& path) const;
    static CsfLut load(const std::string& path);
    void export_csv(const std::string& path) const;

private:
    std::array<LutTable, kNumChannels> tables_;
    std::uint64_t params_hash_ = 0;
};

CsfLut build_lut(const CastleCsf& model, int nodes_L = CsfLut::kDefaultNodes,
                 int nodes_rho = CsfLut::kDefaultNodes);

// Returns a LUT for the parameters, reading or writing the cache directory
// when one is available (CVVDP_CACHE_DIR, else ~/.cache/cvvdp).
std::shared_ptr<const CsfLut> cached_lut(const CastleCsfParams& params, const std::string& cache_dir = "");
std::string default_cache_dir();

// Sensitivity along log10 L for a fixed band frequency; used per pixel.
class BandSensitivity {
public:
    BandSensitivity() = default;
    BandSensitivity(const CsfLut& lut, VisualChannel ch, double rho);

    // S at luminance L (cd/m^2).
    float operator()(float L) const;
    // log10 S given log10 L.
    float log10_at(float log10_L) const;

private:
    float log_L0_ = 0.0f;
    float inv_step_ = 1.0f;
    int n_ = 0;
    std::vector<float> log_S_;
};

}  // namespace cvvdp::csf
