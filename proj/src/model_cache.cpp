#include "blab/model_cache.hpp"

#include <cstdio>
#include <fstream>

namespace blab {

namespace {

constexpr int kCacheSchema = 1;

std::string gram_hash(const CMatrix& g)
{
  std::string bytes;
  char buf[64];
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g;", g(i, j).real(), g(i, j).imag());
      bytes += buf;
    }
  }
  return fnv1a_hex(bytes);
}

} // namespace

std::string model_spec_hash(const json& weight_json, int n, int degree_cap, const RuleParams& rule)
{
  const json id = {{"weight", weight_json}, {"dimension", n}, {"degree_cap", degree_cap}, {"rule", rule_to_json(rule)}};
  return config_hash(id);
}

void store_model(const BergmanModel& model, const json& weight_json, const std::string& path)
{
  json entries = json::array();
  const CMatrix& g = model.gram();
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      entries.push_back({g(i, j).real(), g(i, j).imag()});
  json basis = json::array();
  for (const auto& m : model.basis()) {
    json e = json::array();
    for (int k = 0; k < model.dimension(); ++k)
      e.push_back(m.exponents[k]);
    basis.push_back(e);
  }
  const json out = {
      {"schema_version", kCacheSchema},
      {"kind", "blab-model"},
      {"spec_hash", model_spec_hash(weight_json, model.dimension(), model.degree_cap(), model.rule_params())},
      {"content_hash", gram_hash(g)},
      {"weight", weight_json},
      {"dimension", model.dimension()},
      {"degree_cap", model.degree_cap()},
      {"rule", rule_to_json(model.rule_params())},
      {"condition_estimate", model.condition_estimate()},
      {"basis", basis},
      {"gram", entries}};
  std::ofstream f(path);
  if (!f)
    throw ConfigError("cannot write model cache '" + path + "'");
  f << out.dump(1) << '\n';
  if (!f)
    throw ConfigError("failed writing model cache '" + path + "'");
}

BergmanModel load_model(const std::string& path, const json& weight_json, const WeightSpec& spec,
                        int degree_cap, const RuleParams& rule)
{
  const json j = read_json_file(path);
  try {
    if (j.at("kind") != "blab-model" || j.at("schema_version") != kCacheSchema)
      throw ConfigError("'" + path + "' is not a model cache of a supported version");
    const std::string requested = model_spec_hash(weight_json, spec.dimension(), degree_cap, rule);
    if (j.at("spec_hash").get<std::string>() != requested)
      throw ConfigError("model cache '" + path + "' hash mismatch: stored spec differs from the requested spec");
    const std::string recomputed = model_spec_hash(j.at("weight"), j.at("dimension").get<int>(),
                                                   j.at("degree_cap").get<int>(), rule_from_json(j.at("rule")));
    if (recomputed != requested)
      throw ConfigError("model cache '" + path + "' hash mismatch: stored spec fields were modified");
    const auto B = static_cast<Eigen::Index>(graded_lex_basis(spec.dimension(), degree_cap).size());
    const json& entries = j.at("gram");
    if (static_cast<Eigen::Index>(entries.size()) != B * B)
      throw ConfigError("model cache '" + path + "' has the wrong number of Gram entries");
    CMatrix g(B, B);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < B; ++r)
      for (Eigen::Index c = 0; c < B; ++c, ++k)
        g(r, c) = cplx(entries.at(k).at(0).get<double>(), entries.at(k).at(1).get<double>());
    if (gram_hash(g) != j.at("content_hash").get<std::string>())
      throw ConfigError("model cache '" + path + "' hash mismatch: Gram entries were modified");
    return BergmanModel::from_gram(spec, degree_cap, rule, g);
  } catch (const json::exception& e) {
    throw ConfigError("model cache '" + path + "' is malformed: " + e.what());
  }
}

} // namespace blab
