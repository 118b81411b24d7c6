#ifndef BLAB_REPORT_HPP
#define BLAB_REPORT_HPP

#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "blab/config.hpp"
#include "blab/estimate_lab.hpp"

namespace blab {

inline constexpr const char* kCsvVersionTag = "# blab-csv v1";
inline constexpr int kSummarySchema = 1;

struct ExperimentReport {
  std::string name;
  std::string config_hash;
  std::string weight_description;
  std::vector<RatioSeries> series;
  /// One verdict per configured sweep, in declaration order.
  std::vector<std::pair<std::string, Verdict>> verdicts;
  std::vector<std::string> violations;
  double runtime_seconds = 0.0;
};

/// Builds (or loads) the model when needed and runs every sweep in order.
/// Checked inequalities that fail are collected in `violations`. Progress goes to `log`.
ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// CSV: version tag line, header, then one row per point with %.17g numbers.
std::string render_csv(const ExperimentReport& report);

/// JSON summary with schema_version, config_hash, per-series sup/inf/verdict/notes and runtime.
json render_summary(const ExperimentReport& report);

/// Writes <dir>/<name>.csv and <dir>/<name>.summary.json; returns the CSV path.
std::string write_report(const ExperimentReport& report, const std::string& dir);

/// Concatenates CSV reports into one table. Experiments are prefixed with the
/// originating config name. Throws ConfigError on a missing or unknown version tag.
std::string merge_csv(const std::vector<std::string>& contents);

} // namespace blab

#endif
