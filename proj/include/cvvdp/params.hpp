#pragma once

#include <array>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "cvvdp/channels.hpp"

namespace cvvdp {

enum class ContrastEncoding { multiplicative, additive };
enum class MaskingModel { mutual, transducer, similarity };

using ChannelArray = std::array<double, kNumChannels>;

struct MetricParams {
    double s_corr = 0.9683;
    ChannelArray s_ch{1.0, 1.0, 1.7, 0.237};
    double p = 2.264;
    ChannelArray q{1.303, 2.889, 3.681, 3.589};
    double k_c = 366.6;
    double sigma_sp = 3.0;  // band pixels
    ChannelArray k_b{0.003633, 1.663, 4.119, 25.26};
    // xcm[i][c]: weight of masker channel i on channel c.
    std::array<ChannelArray, kNumChannels> xcm{{{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    double k_i = 0.5779;
    ChannelArray w{1.0, 1.0, 1.0, 0.8081};
    double alpha_jod = 0.04396;
    double beta_jod = 0.9302;
    double beta_x = 2.0;
    double beta_b = 4.0;
    double beta_c = 4.0;
    double beta_f = 2.0;

    ContrastEncoding encoding = ContrastEncoding::multiplicative;
    MaskingModel masking = MaskingModel::mutual;
    double additive_gain = 100.0;
    ChannelArray additive_m{1.0, 1.0, 1.7, 0.237};
    ChannelArray multiplicative_m_alt{1.0, 1.0, 1.45, 0.95};
    double transducer_gain = 1.2;
    double transducer_offset = 0.2;
    double similarity_dmax = 366.6;
    double min_background = 0.01;

    void validate() const;
    nlohmann::json to_json() const;
    static MetricParams from_json(const nlohmann::json& j);
    static MetricParams load(const std::string& path);
    std::uint64_t hash() const;
    std::string hash_hex() const;
};

ContrastEncoding parse_encoding(const std::string& s);
MaskingModel parse_masking(const std::string& s);
std::string to_string(ContrastEncoding e);
std::string to_string(MaskingModel m);

// Parses "enc=mult,mask=mutual" style selectors into params.
void apply_variant(MetricParams& params, const std::string& spec);

}  // namespace cvvdp
