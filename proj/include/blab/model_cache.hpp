#ifndef BLAB_MODEL_CACHE_HPP
#define BLAB_MODEL_CACHE_HPP

#include <string>

#include "blab/bergman_model.hpp"
#include "blab/config.hpp"

namespace blab {

/// Identity of a model build: weight JSON, dimension, degree cap and rule.
std::string model_spec_hash(const json& weight_json, int n, int degree_cap, const RuleParams& rule);

/// Writes the model as portable JSON (Gram entries row-major as [re, im]).
void store_model(const BergmanModel& model, const json& weight_json, const std::string& path);

/// Reloads a stored model. Throws ConfigError when the stored spec hash differs
/// from the requested one or the stored content hash does not match the entries.
BergmanModel load_model(const std::string& path, const json& weight_json, const WeightSpec& spec,
                        int degree_cap, const RuleParams& rule);

} // namespace blab

#endif
