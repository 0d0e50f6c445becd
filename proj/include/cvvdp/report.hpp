#pragma once

#include <string>

#include <json.hpp>

#include "cvvdp/metric.hpp"
#include "cvvdp/pooling.hpp"

namespace cvvdp::report {

// JOD, d_pooled, parameter hashes, run geometry and the per-frame,
// per-channel, per-band features. No timestamps, so identical runs give
// identical files.
nlohmann::json make_report(const MetricResult& result, const Metric& metric);

// Rebuilds the pooled features stored by make_report.
pooling::PooledFeatures features_from_report(const nlohmann::json& report);

void write_report(const std::string& path, const nlohmann::json& report);
nlohmann::json read_report(const std::string& path);

}  // namespace cvvdp::report
