// Command-line front end: evaluate distortion risk measures, sample and
// classify distortion curves, run tail-subadditivity checks and VaR-ratio
// scans, and reproduce the built-in worked examples.
//
// Exit codes: 0 success, 1 parse/config error, 2 domain error, 3 divergence,
// 4 an example's computed-vs-expected table mismatched.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "distort/asymptotics.hpp"
#include "distort/cases.hpp"
#include "distort/distortion.hpp"
#include "distort/errors.hpp"
#include "distort/format.hpp"
#include "distort/joint.hpp"
#include "distort/measures.hpp"
#include "distort/parse.hpp"

namespace {

using nlohmann::ordered_json;

struct JointConfig {
  std::optional<distort::JointModel> model;
  double p_start = 0.9;
  double p_end = 0.999;
  std::size_t points = 21;
  std::size_t samples = 0;
  std::uint64_t seed = 1;
};

[[noreturn]] void config_fail(const std::string& msg) {
  throw distort::parse_error(msg, 1, 1);
}

void reject_unknown_keys(const ordered_json& obj,
                         const std::vector<std::string>& allowed,
                         const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const std::string& k : allowed)
      if (item.key() == k) known = true;
    if (!known) config_fail("unknown key '" + item.key() + "' in " + where);
  }
}

std::vector<distort::Distribution> read_marginals(const ordered_json& cfg) {
  if (!cfg.contains("marginals"))
    config_fail("joint config needs a 'marginals' array");
  std::vector<distort::Distribution> out;
  for (const auto& m : cfg.at("marginals")) {
    if (!m.is_string()) config_fail("'marginals' entries must be strings");
    out.push_back(distort::parse_distribution(m.get<std::string>()));
  }
  return out;
}

distort::JointModel read_dependence(const ordered_json& cfg) {
  if (!cfg.contains("dependence"))
    config_fail("joint config needs a 'dependence' object");
  const ordered_json& dep = cfg.at("dependence");
  if (!dep.is_object() || !dep.contains("kind"))
    config_fail("'dependence' must be an object with a 'kind'");
  std::string kind = dep.at("kind").get<std::string>();

  if (kind == "independent" || kind == "comonotone") {
    reject_unknown_keys(dep, {"kind"}, "dependence");
    auto ms = read_marginals(cfg);
    return kind == "independent" ? distort::JointModel::independent(ms)
                                 : distort::JointModel::comonotone(ms);
  }
  if (kind == "copula") {
    reject_unknown_keys(dep, {"kind", "copula"}, "dependence");
    if (!dep.contains("copula"))
      config_fail("copula dependence needs a 'copula' spec string");
    auto ms = read_marginals(cfg);
    if (ms.size() != 2)
      config_fail("copula dependence needs exactly two marginals");
    distort::Copula c =
        distort::parse_copula(dep.at("copula").get<std::string>());
    return distort::JointModel::copula_coupled(ms[0], ms[1], c);
  }
  if (kind == "joint_pmf") {
    reject_unknown_keys(dep, {"kind", "cells"}, "dependence");
    if (cfg.contains("marginals"))
      config_fail("joint_pmf derives its marginals; drop the 'marginals' key");
    if (!dep.contains("cells")) config_fail("joint_pmf needs a 'cells' array");
    std::vector<std::array<double, 3>> cells;
    for (const auto& c : dep.at("cells")) {
      if (!c.is_array() || c.size() != 3)
        config_fail("each joint_pmf cell must be [x, y, p]");
      cells.push_back({c[0].get<double>(), c[1].get<double>(),
                       c[2].get<double>()});
    }
    return distort::JointModel::joint_pmf(cells);
  }
  if (kind == "functional") {
    reject_unknown_keys(dep, {"kind", "maps"}, "dependence");
    if (cfg.contains("marginals"))
      config_fail("functional derives its marginals; drop the 'marginals' key");
    if (!dep.contains("maps")) config_fail("functional needs a 'maps' array");
    std::vector<distort::StepMap> maps;
    for (const auto& m : dep.at("maps")) {
      reject_unknown_keys(m, {"edges", "values"}, "functional map");
      if (!m.contains("edges") || !m.contains("values"))
        config_fail("each functional map needs 'edges' and 'values'");
      distort::StepMap sm;
      for (const auto& e : m.at("edges")) sm.edges.push_back(e.get<double>());
      for (const auto& v : m.at("values"))
        sm.values.push_back(v.get<double>());
      maps.push_back(std::move(sm));
    }
    return distort::JointModel::functional(maps);
  }
  config_fail("unknown dependence kind '" + kind + "'");
}

// --joint accepts either "example:<id>" or a path to a JSON config
// {marginals, dependence, p_start, p_end, points, samples, seed}.
JointConfig load_joint(const std::string& arg) {
  JointConfig jc;
  if (arg.rfind("example:", 0) == 0) {
    jc.model = distort::example_joint(arg.substr(8));
    return jc;
  }
  std::ifstream in(arg);
  if (!in) config_fail("cannot open joint config '" + arg + "'");
  ordered_json cfg;
  try {
    cfg = ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    config_fail(std::string("invalid JSON in '") + arg + "': " + e.what());
  }
  reject_unknown_keys(cfg,
                      {"marginals", "dependence", "p_start", "p_end", "points",
                       "samples", "seed"},
                      "joint config");
  jc.model = read_dependence(cfg);
  if (cfg.contains("p_start")) jc.p_start = cfg.at("p_start").get<double>();
  if (cfg.contains("p_end")) jc.p_end = cfg.at("p_end").get<double>();
  if (cfg.contains("points")) jc.points = cfg.at("points").get<std::size_t>();
  if (cfg.contains("samples"))
    jc.samples = cfg.at("samples").get<std::size_t>();
  if (cfg.contains("seed")) jc.seed = cfg.at("seed").get<std::uint64_t>();
  return jc;
}

// Stream selection: --out writes a file, default is stdout.
class OutStream {
 public:
  explicit OutStream(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) config_fail("cannot open output file '" + path + "'");
    }
  }
  std::ostream& get() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

const char* shape_name(distort::Shape s) {
  switch (s) {
    case distort::Shape::concave:
      return "concave";
    case distort::Shape::convex:
      return "convex";
    case distort::Shape::neither:
      return "neither";
    case distort::Shape::unknown:
      return "unknown";
  }
  return "unknown";
}

int cmd_measure(const std::string& spec, const std::string& descriptor,
                const std::string& out) {
  distort::DistortionFn g = distort::parse_distortion(spec);
  distort::Distribution d = distort::parse_distribution(descriptor);
  distort::MeasureReport r = distort::choquet(g, d);
  ordered_json j;
  j["value"] = r.value;
  j["method"] = r.method;
  j["abs_error_estimate"] = r.abs_error_estimate;
  j["distortion"] = r.distortion_label;
  j["distribution"] = r.distribution_label;
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

int cmd_curve(const std::string& spec, int grid, const std::string& out) {
  if (grid < 2) throw std::domain_error("curve needs --grid >= 2");
  distort::DistortionFn g = distort::parse_distortion(spec);
  OutStream os(out);
  os.get() << "u,g_u\n";
  for (int i = 0; i < grid; ++i) {
    double u = static_cast<double>(i) / (grid - 1);
    os.get() << distort::fmt_num(u) << "," << distort::fmt_num(g(u)) << "\n";
  }
  return 0;
}

int cmd_classify(const std::string& spec, int grid, const std::string& out) {
  distort::DistortionFn g = distort::parse_distortion(spec);
  distort::ShapeReport rep = distort::classify_shape(g, grid);
  ordered_json j;
  j["shape"] = rep.text();
  j["concave"] = rep.concave_ok;
  j["convex"] = rep.convex_ok;
  ordered_json intervals = ordered_json::array();
  for (const distort::ShapeInterval& iv : rep.intervals) {
    ordered_json item;
    item["lo"] = iv.lo;
    item["hi"] = iv.hi;
    item["shape"] = shape_name(iv.shape);
    intervals.push_back(item);
  }
  j["intervals"] = intervals;
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

int cmd_subadd(const std::string& spec, const JointConfig& jc, double alpha,
               const std::string& out) {
  distort::DistortionFn g = distort::parse_distortion(spec);
  distort::SubaddReport r = distort::tail_subadditivity_check(
      g, *jc.model, alpha, jc.samples, jc.seed);
  ordered_json j;
  j["verdict"] = distort::verdict_text(r.verdict);
  j["lhs"] = r.lhs;
  j["rhs"] = r.rhs;
  j["m_alpha"] = r.m_alpha;
  j["s_x"] = r.s_x;
  j["s_y"] = r.s_y;
  j["s_sum"] = r.s_sum;
  j["used_monte_carlo"] = r.used_monte_carlo;
  OutStream os(out);
  os.get() << j.dump(2) << "\n";
  return 0;
}

int cmd_ratio_scan(const JointConfig& jc, const std::string& out) {
  std::optional<distort::McParams> mc;
  if (jc.samples > 0) mc = distort::McParams{jc.samples, jc.seed};
  distort::RatioScan scan =
      distort::ratio_scan(*jc.model, jc.p_start, jc.p_end, jc.points, mc);
  OutStream os(out);
  distort::write_scan_csv(scan, os.get());
  return 0;
}

int cmd_example(const std::string& id) {
  distort::CaseReport rep = distort::run_example(id);
  distort::write_case_report(rep, std::cout);
  return rep.all_pass() ? 0 : 4;
}

int run(int argc, char** argv) {
  CLI::App app{"distortion risk measures: Choquet evaluation, curve tools, "
               "tail checks and VaR-ratio scans"};
  app.require_subcommand(1);

  std::string distortion_spec, dist_descriptor, joint_arg, out_path;
  std::string example_id;
  double alpha = 0.95;
  double p_start = 0.0, p_end = 0.0;
  std::size_t points = 0, samples = 0;
  std::uint64_t seed = 0;
  int grid = 0;

  CLI::App* m = app.add_subcommand("measure", "evaluate a distortion measure");
  m->add_option("--distortion", distortion_spec, "distortion spec")
      ->required();
  m->add_option("--dist", dist_descriptor, "distribution descriptor")
      ->required();
  m->add_option("--out", out_path, "write the JSON report to a file");

  CLI::App* cv = app.add_subcommand("curve", "sample g on a uniform grid");
  cv->add_option("--distortion", distortion_spec, "distortion spec")
      ->required();
  cv->add_option("--grid", grid, "number of grid points")->default_val(101);
  cv->add_option("--out", out_path, "write the CSV to a file");

  CLI::App* cl = app.add_subcommand("classify", "report the curve's shape");
  cl->add_option("--distortion", distortion_spec, "distortion spec")
      ->required();
  cl->add_option("--grid", grid, "classification grid size")
      ->default_val(10000);
  cl->add_option("--out", out_path, "write the JSON report to a file");

  CLI::App* sa =
      app.add_subcommand("subadd", "tail-subadditivity check on a joint model");
  sa->add_option("--distortion", distortion_spec, "distortion spec")
      ->required();
  sa->add_option("--joint", joint_arg, "joint config JSON path or example:<id>")
      ->required();
  sa->add_option("--alpha", alpha, "tail level in (0,1)")->required();
  sa->add_option("--samples", samples, "Monte Carlo sample count");
  sa->add_option("--seed", seed, "Monte Carlo seed");
  sa->add_option("--out", out_path, "write the JSON report to a file");

  CLI::App* rs =
      app.add_subcommand("ratio-scan", "VaR ratio of a sum over a p grid");
  rs->add_option("--joint", joint_arg, "joint config JSON path or example:<id>")
      ->required();
  rs->add_option("--p-start", p_start, "first grid level");
  rs->add_option("--p-end", p_end, "last grid level");
  rs->add_option("--points", points, "grid point count");
  rs->add_option("--samples", samples, "Monte Carlo sample count");
  rs->add_option("--seed", seed, "Monte Carlo seed");
  rs->add_option("--out", out_path, "write the CSV to a file");

  CLI::App* ex =
      app.add_subcommand("example", "recompute a built-in worked example");
  ex->add_option("id", example_id, "one of 3.1 3.2 3.3 4.1 4.2 4.3 4.4")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (app.got_subcommand(m))
    return cmd_measure(distortion_spec, dist_descriptor, out_path);
  if (app.got_subcommand(cv)) return cmd_curve(distortion_spec, grid, out_path);
  if (app.got_subcommand(cl))
    return cmd_classify(distortion_spec, grid, out_path);
  if (app.got_subcommand(sa)) {
    JointConfig jc = load_joint(joint_arg);
    if (sa->count("--samples")) jc.samples = samples;
    if (sa->count("--seed")) jc.seed = seed;
    return cmd_subadd(distortion_spec, jc, alpha, out_path);
  }
  if (app.got_subcommand(rs)) {
    JointConfig jc = load_joint(joint_arg);
    if (rs->count("--p-start")) jc.p_start = p_start;
    if (rs->count("--p-end")) jc.p_end = p_end;
    if (rs->count("--points")) jc.points = points;
    if (rs->count("--samples")) jc.samples = samples;
    if (rs->count("--seed")) jc.seed = seed;
    return cmd_ratio_scan(jc, out_path);
  }
  if (app.got_subcommand(ex)) return cmd_example(example_id);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const distort::parse_error& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const distort::divergence_error& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
