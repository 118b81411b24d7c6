// blab: command-line driver for the Bergman-space estimate laboratory.
//
//   blab validate <cfg.json>
//   blab run <cfg.json> [--out DIR] [--seed K] [--threads T]
//   blab kernel build <cfg.json> --cache PATH
//   blab geometry <subop> <args...>
//   blab report <a.csv> <b.csv> ... [--out FILE]
//
// Exit codes: 0 success, 2 validation error, 3 numerical guard, 4 invariant violation.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "blab/bergman_model.hpp"
#include "blab/config.hpp"
#include "blab/geometry.hpp"
#include "blab/model_cache.hpp"
#include "blab/parallel.hpp"
#include "blab/report.hpp"
#include "blab/weights.hpp"

namespace {

using namespace blab;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitInvariant = 4;

CPoint parse_point(const std::string& text)
{
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error&) {
    throw ConfigError("point '" + text + "' is not JSON, expected e.g. [[0.5,0],[0,0.3]]");
  }
  if (!j.is_array())
    throw ConfigError("point must be a JSON array");
  return point_from_json(j, static_cast<int>(j.size()));
}

json complex_json(cplx c)
{
  return json::array({c.real(), c.imag()});
}

int cmd_validate(const std::string& path)
{
  const auto diags = validate_config(read_json_file(path));
  for (const auto& d : diags)
    std::cout << d << '\n';
  if (diags.empty()) {
    std::cout << "ok\n";
    return 0;
  }
  return kExitValidation;
}

int cmd_run(const std::string& path, const std::string& out, long long seed, unsigned threads)
{
  json j = read_json_file(path);
  if (seed >= 0)
    j["seed"] = static_cast<std::uint64_t>(seed);
  const ExperimentConfig cfg = parse_config(j);
  if (threads > 0)
    set_thread_count(threads);
  const ExperimentReport report = run_experiment(cfg, &std::cerr);
  const std::string dir = out.empty() ? cfg.output_dir : out;
  const std::string csv = write_report(report, dir);
  std::cout << csv << '\n';
  for (const auto& [name, v] : report.verdicts)
    std::cout << name << ": " << to_string(v) << '\n';
  if (!report.violations.empty()) {
    for (const auto& v : report.violations)
      std::cerr << "invariant violation: " << v << '\n';
    return kExitInvariant;
  }
  return 0;
}

int cmd_kernel_build(const std::string& path, const std::string& cache, unsigned threads)
{
  const ExperimentConfig cfg = parse_config(read_json_file(path));
  if (threads > 0)
    set_thread_count(threads);
  const auto& m = cfg.model;
  std::ifstream probe(cache);
  if (probe) {
    const BergmanModel model = load_model(cache, cfg.weight_json, *cfg.weight, m.degree_cap, m.rule);
    std::cerr << "[blab] cache hit: " << cache << " matches the requested spec, build skipped\n";
    std::cout << "basis " << model.size() << ", condition " << model.condition_estimate() << '\n';
    return 0;
  }
  const QuadratureRule rule = QuadratureRule::from_params(cfg.dimension, m.rule);
  std::cerr << "[blab] building model: N=" << m.degree_cap << ", " << rule.describe() << '\n';
  const BergmanModel model = BergmanModel::build(*cfg.weight, m.degree_cap, rule);
  store_model(model, cfg.weight_json, cache);
  std::cout << "basis " << model.size() << ", condition " << model.condition_estimate() << '\n';
  return 0;
}

int cmd_geometry(const std::string& op, const std::vector<std::string>& args)
{
  auto need = [&](std::size_t k) {
    if (args.size() != k)
      throw ConfigError("geometry " + op + " takes " + std::to_string(k) + " arguments");
  };
  auto num = [](const std::string& s) {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
      throw ConfigError("'" + s + "' is not a number");
    return v;
  };
  json out;
  if (op == "inner") {
    need(2);
    out = complex_json(hermitian_inner(parse_point(args[0]), parse_point(args[1])));
  } else if (op == "involution") {
    need(2);
    out = point_to_json(involution(parse_point(args[0]), parse_point(args[1])));
  } else if (op == "gamma") {
    need(2);
    out = pseudo_hyperbolic(parse_point(args[0]), parse_point(args[1]));
  } else if (op == "beta") {
    need(2);
    out = bergman_metric(parse_point(args[0]), parse_point(args[1]));
  } else if (op == "in-ball") {
    need(3);
    out = in_bergman_ball(parse_point(args[0]), num(args[1]), parse_point(args[2]));
  } else if (op == "volume") {
    need(2);
    out = bergman_ball_volume(parse_point(args[0]), num(args[1]));
  } else if (op == "ellipsoid") {
    need(2);
    const auto e = ellipsoid_params(parse_point(args[0]), num(args[1]));
    out = {{"center", point_to_json(e.center)},
           {"t_param", e.t_param},
           {"radius_tangential", e.radius_tangential},
           {"radius_normal", e.radius_normal}};
  } else if (op == "constants") {
    if (args.size() < 3 || args.size() > 4)
      throw ConfigError("geometry constants takes: r n a_r [divisor]");
    const int divisor = args.size() == 4 ? static_cast<int>(num(args[3])) : 4;
    const auto k = inclusion_constants(num(args[0]), static_cast<int>(num(args[1])), num(args[2]), divisor);
    out = {{"r1", k.r1}, {"C", k.big_c}, {"alpha", k.alpha}, {"a_r", k.a_r_estimate}, {"divisor", k.divisor}};
  } else if (op == "green") {
    need(1);
    out = green_g(parse_point(args[0]));
  } else if (op == "poisson") {
    need(2);
    out = poisson_kernel(parse_point(args[0]), parse_point(args[1]));
  } else {
    throw ConfigError("unknown geometry operation '" + op +
                      "' (inner, involution, gamma, beta, in-ball, volume, ellipsoid, constants, green, poisson)");
  }
  std::cout << out.dump() << '\n';
  return 0;
}

int cmd_report(const std::vector<std::string>& inputs, const std::string& out)
{
  std::vector<std::string> contents;
  for (const auto& path : inputs) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
      throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    contents.push_back(ss.str());
  }
  const std::string merged = merge_csv(contents);
  if (out.empty()) {
    std::cout << merged;
  } else {
    std::ofstream f(out, std::ios::binary);
    f << merged;
    if (!f)
      throw ConfigError("failed writing '" + out + "'");
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Numerical laboratory for weighted Bergman spaces on the unit ball"};
  app.require_subcommand(1);

  std::string cfg_path, out_dir, cache_path, geo_op, report_out;
  long long seed = -1;
  unsigned threads = 0;
  std::vector<std::string> report_inputs;

  auto* validate = app.add_subcommand("validate", "check a config without running it");
  validate->add_option("config", cfg_path, "experiment config (JSON)")->required();

  auto* run = app.add_subcommand("run", "run every sweep of a config and write CSV + JSON");
  run->add_option("config", cfg_path, "experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "output directory (default: config output_dir)");
  run->add_option("--seed", seed, "override the config seed")->check(CLI::NonNegativeNumber);
  run->add_option("--threads", threads, "worker threads (results do not depend on it)");

  auto* kernel = app.add_subcommand("kernel", "model operations");
  kernel->require_subcommand(1);
  auto* build = kernel->add_subcommand("build", "build a model and store it in a cache file");
  build->add_option("config", cfg_path, "experiment config (JSON)")->required();
  build->add_option("--cache", cache_path, "model cache path")->required();
  build->add_option("--threads", threads, "worker threads");

  auto* geometry = app.add_subcommand("geometry", "single geometry evaluations; points as JSON, e.g. [[0.5,0],[0,0.3]]");
  geometry->add_option("op", geo_op, "inner | involution | gamma | beta | in-ball | volume | ellipsoid | constants | green | poisson")->required();
  geometry->allow_extras();

  auto* report = app.add_subcommand("report", "merge CSV reports into one table");
  report->add_option("inputs", report_inputs, "CSV reports")->required();
  report->add_option("--out", report_out, "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*validate)
      return cmd_validate(cfg_path);
    if (*run)
      return cmd_run(cfg_path, out_dir, seed, threads);
    if (*build)
      return cmd_kernel_build(cfg_path, cache_path, threads);
    if (*geometry)
      return cmd_geometry(geo_op, geometry->remaining());
    if (*report)
      return cmd_report(report_inputs, report_out);
  } catch (const NumericalGuard& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const PoleError& e) {
    std::cerr << "numerical guard: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid argument: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
