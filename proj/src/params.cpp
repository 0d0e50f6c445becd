#include "cvvdp/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cvvdp/error.hpp"

namespace cvvdp {

using nlohmann::json;

namespace {

void check_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("metric parameter ") + name + " must be > 0");
}

template <typename A>
void read_array(const json& j, const char* key, A& out) {
    if (!j.contains(key)) return;
    const auto& a = j.at(key);
    if (!a.is_array() || a.size() != out.size())
        throw ConfigError(std::string("metric parameter ") + key + " must be an array of " + std::to_string(out.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.at(i).get<double>();
}

}  // namespace

void MetricParams::validate() const {
    check_positive(s_corr, "s_corr");
    check_positive(p, "p");
    check_positive(k_c, "k_c");
    check_positive(sigma_sp, "sigma_sp");
    check_positive(k_i, "k_i");
    check_positive(alpha_jod, "alpha_jod");
    check_positive(beta_jod, "beta_jod");
    check_positive(beta_x, "beta_x");
    check_positive(beta_b, "beta_b");
    check_positive(beta_c, "beta_c");
    check_positive(beta_f, "beta_f");
    check_positive(additive_gain, "additive_gain");
    check_positive(similarity_dmax, "similarity_dmax");
    check_positive(min_background, "min_background");
    for (int c = 0; c < kNumChannels; ++c) {
        check_positive(q[c], "q");
        check_positive(s_ch[c], "s_ch");
        if (!(w[c] >= 0.0)) throw ConfigError("metric parameter w must be >= 0");
        if (!(k_b[c] >= 0.0)) throw ConfigError("metric parameter k_b must be >= 0");
        for (int i = 0; i < kNumChannels; ++i)
            if (!(xcm[i][c] >= 0.0)) throw ConfigError("cross-channel masking matrix must be nonnegative");
    }
}

json MetricParams::to_json() const {
    json x = json::array();
    for (const auto& row : xcm) x.push_back(row);
    return {{"s_corr", s_corr},
            {"s_ch", s_ch},
            {"p", p},
            {"q", q},
            {"k_c", k_c},
            {"sigma_sp", sigma_sp},
            {"k_b", k_b},
            {"cross_channel", x},
            {"k_i", k_i},
            {"w", w},
            {"alpha_jod", alpha_jod},
            {"beta_jod", beta_jod},
            {"beta_x", beta_x},
            {"beta_b", beta_b},
            {"beta_c", beta_c},
            {"beta_f", beta_f},
            {"encoding", to_string(encoding)},
            {"masking", to_string(masking)},
            {"additive_gain", additive_gain},
            {"additive_m", additive_m},
            {"multiplicative_m_alt", multiplicative_m_alt},
            {"transducer_gain", transducer_gain},
            {"transducer_offset", transducer_offset},
            {"similarity_dmax", similarity_dmax},
            {"min_background", min_background}};
}

MetricParams MetricParams::from_json(const json& j) {
    MetricParams m;
    try {
        m.s_corr = j.value("s_corr", m.s_corr);
        read_array(j, "s_ch", m.s_ch);
        m.p = j.value("p", m.p);
        read_array(j, "q", m.q);
        m.k_c = j.value("k_c", m.k_c);
        m.sigma_sp = j.value("sigma_sp", m.sigma_sp);
        read_array(j, "k_b", m.k_b);
        if (j.contains("cross_channel")) {
            const auto& x = j.at("cross_channel");
            if (!x.is_array() || x.size() != kNumChannels) throw ConfigError("cross_channel must be 4x4");
            for (int i = 0; i < kNumChannels; ++i) {
                if (!x.at(i).is_array() || x.at(i).size() != kNumChannels) throw ConfigError("cross_channel must be 4x4");
                for (int c = 0; c < kNumChannels; ++c) m.xcm[i][c] = x.at(i).at(c).get<double>();
            }
        }
        m.k_i = j.value("k_i", m.k_i);
        read_array(j, "w", m.w);
        m.alpha_jod = j.value("alpha_jod", m.alpha_jod);
        m.beta_jod = j.value("beta_jod", m.beta_jod);
        m.beta_x = j.value("beta_x", m.beta_x);
        m.beta_b = j.value("beta_b", m.beta_b);
        m.beta_c = j.value("beta_c", m.beta_c);
        m.beta_f = j.value("beta_f", m.beta_f);
        if (j.contains("encoding")) m.encoding = parse_encoding(j.at("encoding").get<std::string>());
        if (j.contains("masking")) m.masking = parse_masking(j.at("masking").get<std::string>());
        m.additive_gain = j.value("additive_gain", m.additive_gain);
        read_array(j, "additive_m", m.additive_m);
        read_array(j, "multiplicative_m_alt", m.multiplicative_m_alt);
        m.transducer_gain = j.value("transducer_gain", m.transducer_gain);
        m.transducer_offset = j.value("transducer_offset", m.transducer_offset);
        m.similarity_dmax = j.value("similarity_dmax", m.similarity_dmax);
        m.min_background = j.value("min_background", m.min_background);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("metric parameters: ") + e.what());
    }
    m.validate();
    return m;
}

MetricParams MetricParams::load(const std::string& path) {
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

std::uint64_t MetricParams::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : to_json().dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::string MetricParams::hash_hex() const {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << hash();
    return s.str();
}

ContrastEncoding parse_encoding(const std::string& s) {
    if (s == "mult" || s == "multiplicative") return ContrastEncoding::multiplicative;
    if (s == "add" || s == "additive") return ContrastEncoding::additive;
    throw ConfigError("unknown contrast encoding '" + s + "'");
}

MaskingModel parse_masking(const std::string& s) {
    if (s == "mutual") return MaskingModel::mutual;
    if (s == "transducer") return MaskingModel::transducer;
    if (s == "similarity" || s == "sim") return MaskingModel::similarity;
    throw ConfigError("unknown masking model '" + s + "'");
}

std::string to_string(ContrastEncoding e) { return e == ContrastEncoding::multiplicative ? "mult" : "add"; }

std::string to_string(MaskingModel m) {
    switch (m) {
        case MaskingModel::mutual: return "mutual";
        case MaskingModel::transducer: return "transducer";
        case MaskingModel::similarity: return "similarity";
    }
    return "?";
}

void apply_variant(MetricParams& params, const std::string& spec) {
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("variant item '" + item + "' is not key=value");
        const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
        if (key == "enc" || key == "encoding")
            params.encoding = parse_encoding(value);
        else if (key == "mask" || key == "masking")
            params.masking = parse_masking(value);
        else
            throw ConfigError("unknown variant key '" + key + "'");
    }
}

}  // namespace cvvdp
