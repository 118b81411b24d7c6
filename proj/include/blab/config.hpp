#ifndef BLAB_CONFIG_HPP
#define BLAB_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "blab/estimate_lab.hpp"
#include "blab/measures.hpp"
#include "blab/quadrature.hpp"
#include "blab/weights.hpp"

namespace blab {

using json = nlohmann::json;

struct SweepConfig {
  std::string type;
  std::string name;
  json params;
  std::uint64_t seed = 0;
};

struct ModelConfig {
  int degree_cap = 12;
  RuleParams rule;
  std::string cache_path; // empty: no cache
};

struct ExperimentConfig {
  std::string name;
  int dimension = 2;
  std::uint64_t seed = 0;
  std::optional<WeightSpec> weight;
  json weight_json;
  std::map<std::string, BallMeasure> measures;
  ModelConfig model;
  std::vector<SweepConfig> sweeps;
  std::string output_dir = ".";
  std::string hash;
};

/// 64-bit FNV-1a of a byte string, as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Hash of the canonical (key-sorted, compact) serialization.
std::string config_hash(const json& j);

json read_json_file(const std::string& path);

/// Every violated precondition, without running anything. Empty means valid.
std::vector<std::string> validate_config(const json& j);

/// Parses and validates; throws ConfigError listing all diagnostics.
ExperimentConfig parse_config(const json& j);

// JSON conversions shared with the model cache and the CLI.
CPoint point_from_json(const json& j, int n);
json point_to_json(const CPoint& z);
BallMeasure ball_measure_from_json(const json& j, int n);
BoundaryMeasure boundary_measure_from_json(const json& j, int n);
WeightSpec weight_from_json(const json& j, int n, const std::map<std::string, BallMeasure>& named = {});
RuleParams rule_from_json(const json& j);
json rule_to_json(const RuleParams& r);
GridSpec grid_from_json(const json& j, std::uint64_t default_seed);

} // namespace blab

#endif
