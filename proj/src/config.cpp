#include "blab/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "blab/bergman_model.hpp"
#include "blab/random.hpp"

namespace blab {

namespace {

const std::set<std::string> kSweepTypes = {
    "norm_estimate", "carleson",        "embedding",      "local_kernel_equivalence",
    "pointwise_decay", "difference_bound", "forelli_rudin", "test_functions",
    "comparability",   "hessian",          "a_r"};

json kernel_grid_default()
{
  return {{"levels", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6}}, {"directions", 8}};
}

json boundary_levels_default()
{
  return json::array({0.5, 0.8, 0.9, 0.95, 0.98, 0.99, 0.995});
}

json sweep_defaults(const std::string& type)
{
  if (type == "norm_estimate")
    return {{"grid", kernel_grid_default()}};
  if (type == "carleson")
    return {{"p", 2.0},
            {"p_tilde", 2.0},
            {"r", 0.5},
            {"grid", {{"levels", boundary_levels_default()}, {"directions", 4}}},
            {"mass", {{"method", "product"}, {"radial_order", 32}, {"sphere_count", 4096}, {"samples", 20000}}}};
  if (type == "embedding")
    return {{"p", 2.0}, {"p_tilde", 2.0}, {"levels", boundary_levels_default()}};
  if (type == "local_kernel_equivalence")
    return {{"r", 0.5}, {"grid", kernel_grid_default()}, {"pairs_per_point", 8}, {"divisor", 16}, {"a_r_pairs", 2000}};
  if (type == "pointwise_decay")
    return {{"t_values", {0.25, 0.5, 0.75}}, {"pairs", 400}};
  if (type == "difference_bound")
    return {{"r", 0.5}, {"trials", 1000}, {"a_r_pairs", 2000}};
  if (type == "forelli_rudin")
    return {{"q", 0.0}, {"t", 2.0}, {"levels", {0.5, 0.7, 0.8, 0.9, 0.95, 0.98, 0.99}}};
  if (type == "test_functions") {
    json levels = json::array();
    for (int k = 0; k < 30; ++k)
      levels.push_back(1.0 - 0.5 * std::pow(0.8, k));
    return {{"p", 2.0},
            {"levels", levels},
            {"compact_grid", {{"levels", {0.1, 0.2, 0.3, 0.4, 0.5}}, {"directions", 8}}}};
  }
  if (type == "comparability")
    return {{"r", 0.5}, {"levels", {0.5, 0.7, 0.9, 0.95, 0.99}}, {"samples", 4000}};
  if (type == "hessian")
    return {{"points", 50}, {"t_values", {0.25, 0.5, 0.75}}};
  if (type == "a_r")
    return {{"r_values", {0.1, 0.25, 0.5, 0.75}}, {"pairs", 2000}};
  return json::object();
}

double number(const json& j, const char* key)
{
  if (!j.contains(key))
    throw ConfigError(std::string("missing field '") + key + "'");
  if (!j.at(key).is_number())
    throw ConfigError(std::string("field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const json& j, const char* key, double fallback)
{
  return j.contains(key) ? number(j, key) : fallback;
}

long integer(const json& j, const char* key)
{
  const double v = number(j, key);
  if (v != std::floor(v))
    throw ConfigError(std::string("field '") + key + "' must be an integer");
  return static_cast<long>(v);
}

std::vector<double> number_list(const json& j, const char* key)
{
  if (!j.contains(key) || !j.at(key).is_array())
    throw ConfigError(std::string("field '") + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number())
      throw ConfigError(std::string("field '") + key + "' must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void require_range(bool ok, const std::string& msg)
{
  if (!ok)
    throw ConfigError(msg);
}

std::vector<Atom> atoms_from_json(const json& j, int n)
{
  if (!j.contains("atoms") || !j.at("atoms").is_array())
    throw ConfigError("atomic measure needs an 'atoms' array");
  std::vector<Atom> atoms;
  for (const auto& a : j.at("atoms")) {
    if (!a.contains("point"))
      throw ConfigError("atom without 'point'");
    atoms.push_back({point_from_json(a.at("point"), n), number(a, "mass")});
  }
  return atoms;
}

struct Collector {
  std::vector<std::string> diags;

  template <typename F>
  void check(const std::string& where, F&& f)
  {
    try {
      f();
    } catch (const json::exception& e) {
      diags.push_back(where + ": " + e.what());
    } catch (const Error& e) {
      diags.push_back(where + ": " + e.what());
    }
  }
};

void check_sweep(const SweepConfig& sw, const ExperimentConfig& cfg, Collector& c)
{
  const json& p = sw.params;
  const int n = cfg.dimension;
  const std::string where = "sweep '" + sw.name + "'";
  auto measure = [&]() -> const BallMeasure& {
    if (!p.contains("measure") || !p.at("measure").is_string())
      throw ConfigError("needs a 'measure' naming an entry of 'measures'");
    const auto it = cfg.measures.find(p.at("measure").get<std::string>());
    if (it == cfg.measures.end())
      throw ConfigError("measure '" + p.at("measure").get<std::string>() + "' is not defined");
    return it->second;
  };
  auto radius = [&](const char* key) {
    const double r = number(p, key);
    require_range(r > 0.0 && r < 1.0, std::string(key) + " must lie in (0, 1)");
  };
  auto exponents = [&] {
    require_range(number(p, "p") > 0.0, "p must be positive");
    require_range(number(p, "p_tilde") > 0.0, "p_tilde must be positive");
  };
  auto levels = [&](const char* key, bool allow_zero) {
    const auto lv = number_list(p, key);
    require_range(!lv.empty(), std::string(key) + " must be nonempty");
    for (std::size_t i = 0; i < lv.size(); ++i) {
      require_range((allow_zero ? lv[i] >= 0.0 : lv[i] > 0.0) && lv[i] < 1.0,
                    std::string(key) + " entries must lie in " + (allow_zero ? "[0, 1)" : "(0, 1)"));
      require_range(i == 0 || lv[i] > lv[i - 1], std::string(key) + " must be strictly increasing");
    }
  };
  auto direction = [&] {
    if (p.contains("direction"))
      require_range(point_from_json(p.at("direction"), n).norm() > 0.0, "direction must be nonzero");
  };
  auto positive_int = [&](const char* key) {
    require_range(integer(p, key) >= 1, std::string(key) + " must be >= 1");
  };
  auto t_hypotheses = [&] {
    if (!cfg.weight)
      return;
    const auto h = check_test_function_hypotheses(*cfg.weight, number(p, "t"));
    for (const auto& d : h.diagnostics)
      c.diags.push_back(where + ": " + d);
  };

  if (sw.type == "norm_estimate") {
    c.check(where, [&] { validate_grid(grid_from_json(p.at("grid"), 0)); });
  } else if (sw.type == "carleson") {
    c.check(where, [&] { measure(); });
    c.check(where, exponents);
    c.check(where, [&] { radius("r"); });
    c.check(where, [&] { validate_grid(grid_from_json(p.at("grid"), 0)); });
    c.check(where, [&] {
      const json& m = p.at("mass");
      const std::string method = m.value("method", "product");
      require_range(method == "product" || method == "monte_carlo",
                    "mass.method must be 'product' or 'monte_carlo'");
    });
  } else if (sw.type == "embedding") {
    c.check(where, [&] { measure(); });
    c.check(where, exponents);
    c.check(where, [&] { levels("levels", true); });
    c.check(where, direction);
    c.check(where, t_hypotheses);
  } else if (sw.type == "local_kernel_equivalence") {
    c.check(where, [&] { radius("r"); });
    c.check(where, [&] { validate_grid(grid_from_json(p.at("grid"), 0)); });
    c.check(where, [&] { positive_int("pairs_per_point"); });
    c.check(where, [&] {
      const long d = integer(p, "divisor");
      require_range(d == 4 || d == 16, "divisor must be 4 or 16");
    });
    c.check(where, [&] {
      if (p.contains("a_r"))
        require_range(number(p, "a_r") >= 1.0, "a_r must be >= 1");
    });
  } else if (sw.type == "pointwise_decay") {
    c.check(where, [&] {
      for (double t : number_list(p, "t_values"))
        require_range(t > 0.0 && t < 1.0, "t_values must lie in (0, 1)");
    });
    c.check(where, [&] { positive_int("pairs"); });
  } else if (sw.type == "difference_bound") {
    c.check(where, [&] { radius("r"); });
    c.check(where, [&] { positive_int("trials"); });
    c.check(where, [&] {
      if (p.contains("a_r"))
        require_range(number(p, "a_r") >= 1.0, "a_r must be >= 1");
    });
  } else if (sw.type == "forelli_rudin") {
    c.check(where, [&] {
      const double q = number(p, "q"), t = number(p, "t");
      require_range(q > -1.0, "q must exceed -1");
      require_range(2.0 * n + t > n + 1.0 + q, "exponents must satisfy 2n + t > n + 1 + q");
    });
    c.check(where, [&] { levels("levels", false); });
    c.check(where, [&] {
      if (p.contains("rule"))
        rule_from_json(p.at("rule"));
    });
  } else if (sw.type == "test_functions") {
    c.check(where, [&] { require_range(number(p, "p") > 0.0, "p must be positive"); });
    c.check(where, [&] { levels("levels", true); });
    c.check(where, direction);
    c.check(where, [&] { validate_grid(grid_from_json(p.at("compact_grid"), 0)); });
    c.check(where, t_hypotheses);
  } else if (sw.type == "comparability") {
    c.check(where, [&] { radius("r"); });
    c.check(where, [&] { levels("levels", true); });
    c.check(where, direction);
    c.check(where, [&] { positive_int("samples"); });
  } else if (sw.type == "hessian") {
    c.check(where, [&] { positive_int("points"); });
    c.check(where, [&] {
      for (double t : number_list(p, "t_values"))
        require_range(t > 0.0 && t < 1.0, "t_values must lie in (0, 1)");
    });
  } else if (sw.type == "a_r") {
    c.check(where, [&] {
      for (double r : number_list(p, "r_values"))
        require_range(r > 0.0 && r < 1.0, "r_values must lie in (0, 1)");
    });
    c.check(where, [&] { positive_int("pairs"); });
  }
}

ExperimentConfig parse_impl(const json& j, Collector& c)
{
  ExperimentConfig cfg;
  if (!j.is_object()) {
    c.diags.push_back("config must be a JSON object");
    return cfg;
  }
  c.check("name", [&] {
    require_range(j.contains("name") && j.at("name").is_string() && !j.at("name").get<std::string>().empty(),
                  "config needs a nonempty string 'name'");
    cfg.name = j.at("name").get<std::string>();
    for (char ch : cfg.name)
      require_range(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.',
                    "name may contain only letters, digits, '_', '-' and '.'");
  });
  bool dim_ok = false;
  c.check("dimension", [&] {
    const long n = integer(j, "dimension");
    require_range(n >= 1 && n <= kMaxDimension,
                  "dimension must lie in [1, " + std::to_string(kMaxDimension) + "]");
    cfg.dimension = static_cast<int>(n);
    dim_ok = true;
  });
  c.check("seed", [&] {
    if (j.contains("seed")) {
      require_range(j.at("seed").is_number_unsigned() || (j.at("seed").is_number_integer() && j.at("seed").get<long long>() >= 0),
                    "seed must be a nonnegative integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
    }
  });
  c.check("output_dir", [&] {
    if (j.contains("output_dir"))
      cfg.output_dir = j.at("output_dir").get<std::string>();
  });
  if (!dim_ok)
    return cfg;
  const int n = cfg.dimension;

  if (j.contains("measures")) {
    c.check("measures", [&] { require_range(j.at("measures").is_object(), "'measures' must be an object"); });
    if (j.at("measures").is_object())
      for (const auto& [key, m] : j.at("measures").items())
        c.check("measure '" + key + "'", [&] { cfg.measures.emplace(key, ball_measure_from_json(m, n)); });
  }
  c.check("weight", [&] {
    if (!j.contains("weight"))
      throw ConfigError("config needs a 'weight'");
    cfg.weight_json = j.at("weight");
    cfg.weight = weight_from_json(j.at("weight"), n, cfg.measures);
  });
  c.check("model", [&] {
    if (!j.contains("model"))
      return;
    const json& m = j.at("model");
    if (m.contains("degree_cap")) {
      const long N = integer(m, "degree_cap");
      require_range(N >= 1, "model.degree_cap must be >= 1");
      cfg.model.degree_cap = static_cast<int>(N);
    } else {
      cfg.model.degree_cap = n == 3 ? 8 : 12;
    }
    if (m.contains("rule"))
      cfg.model.rule = rule_from_json(m.at("rule"));
    if (m.contains("cache"))
      cfg.model.cache_path = m.at("cache").get<std::string>();
  });
  cfg.model.rule.seed = j.contains("model") && j.at("model").contains("rule") &&
                                j.at("model").at("rule").contains("seed")
                            ? cfg.model.rule.seed
                            : cfg.seed;

  c.check("sweeps", [&] {
    require_range(j.contains("sweeps") && j.at("sweeps").is_array() && !j.at("sweeps").empty(),
                  "config needs a nonempty 'sweeps' array");
  });
  std::set<std::string> names;
  if (j.contains("sweeps") && j.at("sweeps").is_array()) {
    std::uint64_t index = 0;
    for (const auto& s : j.at("sweeps")) {
      const std::string where = "sweep #" + std::to_string(index);
      SweepConfig sw;
      c.check(where, [&] {
        require_range(s.is_object() && s.contains("type") && s.at("type").is_string(),
                      "sweep needs a string 'type'");
        sw.type = s.at("type").get<std::string>();
        require_range(kSweepTypes.count(sw.type) == 1, "unknown sweep type '" + sw.type + "'");
        sw.name = s.value("name", sw.type);
        require_range(names.insert(sw.name).second, "duplicate sweep name '" + sw.name + "'");
        sw.params = sweep_defaults(sw.type);
        for (const auto& [k, v] : s.items())
          if (k != "type" && k != "name")
            sw.params[k] = v;
        sw.seed = sw.params.contains("seed") ? sw.params.at("seed").get<std::uint64_t>()
                                             : splitmix64(cfg.seed + 0x51ULL * (index + 1));
      });
      if (!sw.name.empty() && kSweepTypes.count(sw.type) == 1) {
        check_sweep(sw, cfg, c);
        cfg.sweeps.push_back(std::move(sw));
      }
      ++index;
    }
  }
  cfg.hash = config_hash(j);
  return cfg;
}

} // namespace

std::string fnv1a_hex(const std::string& bytes)
{
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const json& j)
{
  return fnv1a_hex(j.dump());
}

json read_json_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<std::string> validate_config(const json& j)
{
  Collector c;
  parse_impl(j, c);
  return c.diags;
}

ExperimentConfig parse_config(const json& j)
{
  Collector c;
  ExperimentConfig cfg = parse_impl(j, c);
  if (!c.diags.empty()) {
    std::string msg = "invalid configuration:";
    for (const auto& d : c.diags)
      msg += "\n  " + d;
    throw ConfigError(msg);
  }
  return cfg;
}

CPoint point_from_json(const json& j, int n)
{
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw ConfigError("point must be an array of " + std::to_string(n) + " coordinates");
  CPoint z(n);
  for (int k = 0; k < n; ++k) {
    const json& c = j.at(k);
    if (c.is_number()) {
      z(k) = c.get<double>();
    } else if (c.is_array() && c.size() == 2 && c.at(0).is_number() && c.at(1).is_number()) {
      z(k) = cplx(c.at(0).get<double>(), c.at(1).get<double>());
    } else {
      throw ConfigError("coordinates must be numbers or [re, im] pairs");
    }
  }
  return z;
}

json point_to_json(const CPoint& z)
{
  json out = json::array();
  for (Eigen::Index k = 0; k < z.size(); ++k)
    out.push_back({z(k).real(), z(k).imag()});
  return out;
}

BallMeasure ball_measure_from_json(const json& j, int n)
{
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("measure needs a 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero")
    return BallMeasure::zero(n);
  if (type == "atomic_ball")
    return BallMeasure::atomic(n, atoms_from_json(j, n));
  if (type == "radial_density")
    return BallMeasure::radial_density(n, number(j, "beta"), number_or(j, "scale", 1.0));
  throw ConfigError("unknown ball measure type '" + type + "'");
}

BoundaryMeasure boundary_measure_from_json(const json& j, int n)
{
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("measure needs a 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "zero")
    return BoundaryMeasure::zero(n);
  if (type == "atomic_boundary")
    return BoundaryMeasure::atomic(n, atoms_from_json(j, n));
  if (type == "uniform_boundary")
    return BoundaryMeasure::uniform(n, number_or(j, "mass", 1.0));
  throw ConfigError("unknown boundary measure type '" + type + "'");
}

WeightSpec weight_from_json(const json& j, int n, const std::map<std::string, BallMeasure>& named)
{
  if (!j.is_object() || !j.contains("type"))
    throw ConfigError("weight needs a 'type'");
  const std::string type = j.at("type").get<std::string>();
  if (type == "reference_radial")
    return WeightSpec::reference_radial(n, number(j, "alpha"));
  if (type == "oscillatory")
    return WeightSpec::oscillatory(n, number(j, "alpha"));
  if (type != "potential_harmonic")
    throw ConfigError("unknown weight type '" + type + "'");
  auto mu = [&]() -> BallMeasure {
    if (!j.contains("mu"))
      return BallMeasure::zero(n);
    const json& m = j.at("mu");
    if (m.is_string()) {
      const auto it = named.find(m.get<std::string>());
      if (it == named.end())
        throw ConfigError("mu refers to undefined measure '" + m.get<std::string>() + "'");
      return it->second;
    }
    return ball_measure_from_json(m, n);
  }();
  BoundaryMeasure nu = j.contains("nu") ? boundary_measure_from_json(j.at("nu"), n) : BoundaryMeasure::zero(n);
  const double q = number(j, "q");
  const double s = number(j, "s");
  return WeightSpec::potential_harmonic(std::move(mu), q, s, std::move(nu));
}

RuleParams rule_from_json(const json& j)
{
  RuleParams r;
  if (!j.is_object())
    throw ConfigError("rule must be an object");
  const std::string kind = j.value("kind", "product");
  if (kind == "product") {
    r.kind = RuleKind::Product;
  } else if (kind == "monte_carlo") {
    r.kind = RuleKind::MonteCarlo;
  } else {
    throw ConfigError("rule.kind must be 'product' or 'monte_carlo'");
  }
  if (j.contains("radial_order"))
    r.radial_order = static_cast<int>(integer(j, "radial_order"));
  if (j.contains("sphere_count"))
    r.sphere_count = static_cast<int>(integer(j, "sphere_count"));
  if (j.contains("mc_count"))
    r.mc_count = static_cast<std::size_t>(integer(j, "mc_count"));
  if (j.contains("seed"))
    r.seed = j.at("seed").get<std::uint64_t>();
  const std::string sphere = j.value("sphere", "structured");
  if (sphere == "structured") {
    r.sphere = SphereKind::Structured;
  } else if (sphere == "random") {
    r.sphere = SphereKind::Random;
  } else {
    throw ConfigError("rule.sphere must be 'structured' or 'random'");
  }
  require_range(r.radial_order >= 1, "rule.radial_order must be >= 1");
  require_range(r.sphere_count >= 1, "rule.sphere_count must be >= 1");
  require_range(r.mc_count >= 2, "rule.mc_count must be >= 2");
  return r;
}

json rule_to_json(const RuleParams& r)
{
  return {{"kind", r.kind == RuleKind::Product ? "product" : "monte_carlo"},
          {"radial_order", r.radial_order},
          {"sphere_count", r.sphere_count},
          {"sphere", r.sphere == SphereKind::Structured ? "structured" : "random"},
          {"mc_count", r.mc_count},
          {"seed", r.seed}};
}

GridSpec grid_from_json(const json& j, std::uint64_t default_seed)
{
  GridSpec g;
  g.radial_levels = number_list(j, "levels");
  g.directions_per_level = j.contains("directions") ? static_cast<int>(integer(j, "directions")) : 8;
  g.seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
  validate_grid(g);
  return g;
}

} // namespace blab
