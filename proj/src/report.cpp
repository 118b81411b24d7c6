#include "blab/report.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#include "blab/bergman_model.hpp"
#include "blab/model_cache.hpp"
#include "blab/random.hpp"

namespace blab {

namespace {

std::string fmt(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> numbers(const json& j, const char* key)
{
  return j.at(key).get<std::vector<double>>();
}

CPoint direction_param(const json& p, int n)
{
  if (p.contains("direction"))
    return point_from_json(p.at("direction"), n);
  CPoint e = CPoint::Zero(n);
  e(0) = 1.0;
  return e;
}

Verdict combine(const std::vector<Verdict>& vs)
{
  bool all_bounded = !vs.empty();
  for (Verdict v : vs) {
    if (v == Verdict::Diverging)
      return Verdict::Diverging;
    all_bounded = all_bounded && v == Verdict::Bounded;
  }
  return all_bounded ? Verdict::Bounded : Verdict::Inconclusive;
}

class Runner {
public:
  Runner(const ExperimentConfig& cfg, std::ostream* log) : cfg_(cfg), log_(log) {}

  const BergmanModel& model()
  {
    if (model_)
      return *model_;
    const auto& m = cfg_.model;
    if (!m.cache_path.empty() && std::filesystem::exists(m.cache_path)) {
      model_ = std::make_unique<BergmanModel>(
          load_model(m.cache_path, cfg_.weight_json, *cfg_.weight, m.degree_cap, m.rule));
      say("cache hit: loaded model from " + m.cache_path + ", build skipped");
      return *model_;
    }
    const QuadratureRule& r = rule();
    say("building model: N=" + std::to_string(m.degree_cap) + ", " + r.describe());
    model_ = std::make_unique<BergmanModel>(BergmanModel::build(*cfg_.weight, m.degree_cap, r));
    if (!m.cache_path.empty()) {
      store_model(*model_, cfg_.weight_json, m.cache_path);
      say("stored model cache " + m.cache_path);
    }
    return *model_;
  }

  const QuadratureRule& rule()
  {
    if (!rule_)
      rule_ = std::make_unique<QuadratureRule>(QuadratureRule::from_params(cfg_.dimension, cfg_.model.rule));
    return *rule_;
  }

  double a_r(const json& p, double r, std::uint64_t seed)
  {
    if (p.contains("a_r"))
      return p.at("a_r").get<double>();
    return estimate_a_r(model(), r, p.at("a_r_pairs").get<std::size_t>(), seed);
  }

  std::vector<RatioSeries> run(const SweepConfig& sw, std::vector<std::string>& violations)
  {
    const json& p = sw.params;
    const int n = cfg_.dimension;
    const WeightSpec& spec = *cfg_.weight;
    std::vector<RatioSeries> out;
    say("sweep " + sw.name + " (" + sw.type + ")");

    if (sw.type == "norm_estimate") {
      out.push_back(norm_estimate_sweep(model(), grid_from_json(p.at("grid"), sw.seed)));
      for (const auto& pt : out.back().points)
        if (!(pt.ratio > 0.0))
          violations.push_back(sw.name + ": nonpositive norm ratio at |z| = " + fmt(pt.parameter));
    } else if (sw.type == "carleson") {
      const json& m = p.at("mass");
      BallMassOptions mass;
      mass.method = m.value("method", "product") == "monte_carlo" ? MassMethod::MonteCarlo : MassMethod::Product;
      mass.radial_order = m.value("radial_order", 32);
      mass.sphere_count = m.value("sphere_count", 4096);
      mass.samples = m.value("samples", std::size_t{20000});
      mass.seed = sw.seed;
      out.push_back(carleson_ratio_sweep(cfg_.measures.at(p.at("measure")), spec, p.at("p"),
                                         p.at("p_tilde"), p.at("r"), grid_from_json(p.at("grid"), sw.seed),
                                         mass));
    } else if (sw.type == "embedding") {
      const CPoint dir = direction_param(p, n).normalized();
      std::vector<TestFunctionParams> family;
      for (double level : numbers(p, "levels"))
        family.push_back({level * dir, p.at("t").get<double>(), p.at("p").get<double>()});
      out.push_back(embedding_ratio_sweep(cfg_.measures.at(p.at("measure")), spec, p.at("p"),
                                          p.at("p_tilde"), family, rule()));
    } else if (sw.type == "local_kernel_equivalence") {
      const double r = p.at("r");
      out.push_back(local_kernel_equivalence_sweep(model(), r, grid_from_json(p.at("grid"), sw.seed),
                                                   a_r(p, r, sw.seed), p.at("pairs_per_point"),
                                                   p.at("divisor")));
      if (out.back().sup > 1.0 + 1e-10)
        violations.push_back(sw.name + ": |K(z,w)| exceeds ||K_z|| ||K_w|| (sup " + fmt(out.back().sup) + ")");
    } else if (sw.type == "pointwise_decay") {
      for (double t : numbers(p, "t_values")) {
        RatioSeries s = pointwise_decay_sweep(model(), t, p.at("pairs"), sw.seed);
        s.name = "pointwise_decay/t=" + fmt(t);
        for (const auto& pt : s.points)
          if (pt.value > 1.0 + 1e-10)
            violations.push_back(s.name + ": Cauchy-Schwarz violated (" + fmt(pt.value) + ")");
        out.push_back(std::move(s));
      }
    } else if (sw.type == "difference_bound") {
      const double r = p.at("r");
      out.push_back(difference_bound_sweep(model(), r, p.at("trials"), sw.seed, a_r(p, r, sw.seed)));
      if (out.back().notes.at("violations") > 0.0)
        violations.push_back(sw.name + ": " + fmt(out.back().notes.at("violations")) +
                             " trials exceed the bound " + fmt(out.back().notes.at("bound")));
    } else if (sw.type == "forelli_rudin") {
      const RuleParams rp = p.contains("rule") ? rule_from_json(p.at("rule")) : cfg_.model.rule;
      const QuadratureRule fr_rule = QuadratureRule::from_params(n, rp);
      out.push_back(forelli_rudin_slope(p.at("q"), p.at("t"), n, numbers(p, "levels"), fr_rule));
    } else if (sw.type == "test_functions") {
      auto r = test_function_sweep(spec, p.at("t"), p.at("p"), numbers(p, "levels"), direction_param(p, n),
                                   rule(), grid_from_json(p.at("compact_grid"), sw.seed));
      out.push_back(std::move(r.norms));
      out.push_back(std::move(r.maxima));
    } else if (sw.type == "comparability") {
      out.push_back(comparability_sweep(spec, p.at("r"), numbers(p, "levels"), direction_param(p, n),
                                        p.at("samples"), sw.seed));
    } else if (sw.type == "hessian") {
      const auto ts = numbers(p, "t_values");
      const auto count = p.at("points").get<std::size_t>();
      RatioSeries s;
      s.name = "hessian";
      double worst_sm = 0.0, worst_fd = 0.0;
      for (std::size_t k = 0; k < count; ++k) {
        Engine rng = make_stream(sw.seed, k);
        const CPoint z = sample_ball(n, rng, 0.8);
        const CPoint w = sample_ball(n, rng, 0.8);
        const double t = ts[k % ts.size()];
        const HessianCheck h = hessian_inverse_check(z, w, t);
        s.points.push_back({t, h.finite_difference_error, h.identity_residual, 0.0});
        worst_sm = std::max(worst_sm, h.inverse_sum_residual);
        worst_fd = std::max(worst_fd, h.finite_difference_error);
        if (!(h.identity_residual < 1e-10))
          violations.push_back("hessian: identity residual " + fmt(h.identity_residual));
        if (!(h.inverse_sum_residual < 1e-12))
          violations.push_back("hessian: inverse-sum residual " + fmt(h.inverse_sum_residual));
        if (!(h.finite_difference_error < 1e-5))
          violations.push_back("hessian: finite-difference mismatch " + fmt(h.finite_difference_error));
      }
      s.finalize();
      s.notes["max_inverse_sum_residual"] = worst_sm;
      s.notes["max_finite_difference_error"] = worst_fd;
      s.verdict = s.sup < 1e-10 ? Verdict::Bounded : Verdict::Inconclusive;
      out.push_back(std::move(s));
    } else if (sw.type == "a_r") {
      RatioSeries s;
      s.name = "a_r";
      for (double r : numbers(p, "r_values"))
        s.points.push_back({r, r, estimate_a_r(model(), r, p.at("pairs"), sw.seed), 0.0});
      s.finalize();
      s.verdict = std::isfinite(s.sup) ? Verdict::Bounded : Verdict::Inconclusive;
      out.push_back(std::move(s));
    }
    for (auto& s : out) {
      if (s.name == sw.type)
        s.name = sw.name;
      else if (s.name.rfind(sw.type + "/", 0) == 0)
        s.name = sw.name + s.name.substr(sw.type.size());
      else
        s.name = sw.name + "/" + s.name;
    }
    return out;
  }

private:
  void say(const std::string& msg)
  {
    if (log_)
      *log_ << "[blab] " << msg << '\n';
  }

  const ExperimentConfig& cfg_;
  std::ostream* log_;
  std::unique_ptr<QuadratureRule> rule_;
  std::unique_ptr<BergmanModel> model_;
};

} // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg, std::ostream* log)
{
  if (!cfg.weight)
    throw ConfigError("configuration has no weight");
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport report;
  report.name = cfg.name;
  report.config_hash = cfg.hash;
  report.weight_description = cfg.weight->describe();
  Runner runner(cfg, log);
  for (const auto& sw : cfg.sweeps) {
    std::vector<RatioSeries> series = runner.run(sw, report.violations);
    std::vector<Verdict> vs;
    for (auto& s : series) {
      vs.push_back(s.verdict);
      report.series.push_back(std::move(s));
    }
    report.verdicts.emplace_back(sw.name, combine(vs));
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string render_csv(const ExperimentReport& report)
{
  std::ostringstream os;
  os << kCsvVersionTag << " config=" << report.name << " hash=" << report.config_hash << '\n';
  os << "experiment,parameter,value,ratio,stderr\n";
  for (const auto& s : report.series)
    for (const auto& p : s.points)
      os << s.name << ',' << fmt(p.parameter) << ',' << fmt(p.value) << ',' << fmt(p.ratio) << ','
         << fmt(p.std_error) << '\n';
  return os.str();
}

json render_summary(const ExperimentReport& report)
{
  json series = json::array();
  for (const auto& s : report.series) {
    json notes = json::object();
    for (const auto& [k, v] : s.notes)
      notes[k] = std::isfinite(v) ? json(v) : json(nullptr);
    series.push_back({{"name", s.name},
                      {"sup", std::isfinite(s.sup) ? json(s.sup) : json(nullptr)},
                      {"inf", std::isfinite(s.inf) ? json(s.inf) : json(nullptr)},
                      {"verdict", to_string(s.verdict)},
                      {"config_hash", report.config_hash},
                      {"points", s.points.size()},
                      {"notes", notes}});
  }
  json verdicts = json::array();
  for (const auto& [name, v] : report.verdicts)
    verdicts.push_back({{"sweep", name}, {"verdict", to_string(v)}});
  return {{"schema_version", kSummarySchema},
          {"name", report.name},
          {"config_hash", report.config_hash},
          {"weight", report.weight_description},
          {"verdicts", verdicts},
          {"series", series},
          {"violations", report.violations},
          {"runtime_seconds", report.runtime_seconds}};
}

std::string write_report(const ExperimentReport& report, const std::string& dir)
{
  std::filesystem::create_directories(dir);
  const std::string csv_path = (std::filesystem::path(dir) / (report.name + ".csv")).string();
  const std::string json_path = (std::filesystem::path(dir) / (report.name + ".summary.json")).string();
  {
    std::ofstream f(csv_path, std::ios::binary);
    f << render_csv(report);
    if (!f)
      throw ConfigError("failed writing '" + csv_path + "'");
  }
  {
    std::ofstream f(json_path);
    f << render_summary(report).dump(2) << '\n';
    if (!f)
      throw ConfigError("failed writing '" + json_path + "'");
  }
  return csv_path;
}

std::string merge_csv(const std::vector<std::string>& contents)
{
  std::ostringstream os;
  os << kCsvVersionTag << " merged=" << contents.size() << '\n';
  os << "experiment,parameter,value,ratio,stderr\n";
  for (const auto& text : contents) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind(kCsvVersionTag, 0) != 0)
      throw ConfigError("input is not a blab CSV report (missing '" + std::string(kCsvVersionTag) + "' tag)");
    std::string source = "report";
    const auto pos = line.find("config=");
    if (pos != std::string::npos)
      source = line.substr(pos + 7, line.find(' ', pos) - pos - 7);
    if (!std::getline(in, line) || line != "experiment,parameter,value,ratio,stderr")
      throw ConfigError("unexpected CSV header in report '" + source + "'");
    while (std::getline(in, line))
      if (!line.empty())
        os << source << ':' << line << '\n';
  }
  return os.str();
}

} // namespace blab
