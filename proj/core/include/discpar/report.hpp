#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "discpar/metrics.hpp"
#include "discpar/trainer.hpp"

namespace discpar {

std::string metrics_to_json(const Metrics& metrics, int indent = 2);
/// Throws FormatError on malformed input.
Metrics metrics_from_json(std::string_view text);

std::string report_to_json(const RunReport& report, int indent = 2);

/// `bucket,macro_f1,accuracy,count` rows over implicit slots, one per bucket.
std::string bucket_csv(const Metrics& metrics);

/// Writes metrics.json and buckets.csv into `dir` (created if needed).
void emit_metrics(const Metrics& metrics, const std::filesystem::path& dir);
/// Writes report.json (full run), metrics.json and buckets.csv of the test
/// metrics (dev metrics when there is no test split).
void emit_report(const RunReport& report, const std::filesystem::path& dir);

Metrics load_metrics(const std::filesystem::path& path);

}  // namespace discpar
