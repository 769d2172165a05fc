#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "distort/copula.hpp"
#include "distort/distortion.hpp"
#include "distort/distribution.hpp"
#include "distort/errors.hpp"
#include "distort/parse.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace distort;

namespace {

bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol; }

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = std::string(DISTORT_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  RunResult r;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::filesystem::path fixture_dir() {
  static std::filesystem::path dir = [] {
    auto d = std::filesystem::temp_directory_path() /
             ("distort_cli_fixtures_" + std::to_string(::getpid()));
    std::filesystem::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write_fixture(const std::string& name, const std::string& body) {
  auto path = fixture_dir() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

}  // namespace

TEST_CASE("distortion grammar round trips") {
  CHECK(near(parse_distortion("tvar:0.95")(0.025), 0.5, 1e-14));
  CHECK(near(parse_distortion("var:0.9")(0.1 + 1e-12), 1.0, 0.0));
  CHECK(near(parse_distortion("glue:0.5,0.8,0.95,0.99")(0.03), 0.65, 1e-14));
  CHECK(near(parse_distortion("identity")(0.37), 0.37, 0.0));
  CHECK(near(parse_distortion("beta:2,3")(0.3), 0.3483, 1e-9));
  CHECK(near(parse_distortion("wang:0.75")(0.4), 0.6631745392465793, 1e-10));
  CHECK(near(parse_distortion("lookback:0.6")(0.25), 0.7973270827382105,
             1e-12));
  CHECK(near(parse_distortion("power:0.5")(0.25), 0.5, 1e-14));
  CHECK(near(parse_distortion("dualpower:2")(0.5), 0.75, 1e-14));

  CHECK(near(parse_distortion("compose(power:0.5,tvar:0.95)")(0.0125), 0.5,
             1e-14));
  CHECK(near(parse_distortion("mix(0.5*dualpower:1,0.5*dualpower:2)")(0.5),
             0.625, 1e-14));
  CHECK(near(parse_distortion("dual(power:2)")(0.5), 0.75, 1e-14));
  CHECK(near(parse_distortion("tail(identity,0.95)")(0.025), 0.5, 1e-14));
  CHECK(near(parse_distortion("esssup(0.5,identity)")(0.4), 0.7, 1e-14));

  // The grammar is whitespace-strict: specs are single shell tokens.
  CHECK_THROWS_AS((void)parse_distortion(" tvar:0.95"), parse_error);

  // Nested combinations parse depth-first.
  DistortionFn nested =
      parse_distortion("mix(0.3*compose(tvar:0.5,tvar:0.5),0.7*identity)");
  double expect = 0.3 * std::min(0.2 * 4.0, 1.0) + 0.7 * 0.2;
  CHECK(near(nested(0.2), expect, 1e-12));
}

TEST_CASE("copula-derived distortions parse inside the grammar") {
  DistortionFn g = parse_distortion("copula(frank:2,v=0.5)");
  DistortionFn ref = derived_distortion(Copula::frank(2.0), 0.5);
  for (int i = 0; i <= 50; ++i) {
    double u = i / 50.0;
    CHECK(near(g(u), ref(u), 1e-12));
  }

  DistortionFn second = parse_distortion("copula(mo:0.3,0.6,v=0.4,side=second)");
  DistortionFn sref =
      derived_distortion(Copula::marshall_olkin(0.3, 0.6), 0.4, Side::second);
  for (double u : {0.1, 0.5, 0.9}) CHECK(near(second(u), sref(u), 1e-12));

  CHECK(near(parse_distortion("copula(comonotone,v=0.05)")(0.025), 0.5,
             1e-12));
  CHECK_THROWS_AS((void)parse_distortion("copula(frank:2,v=1.5)"),
                  parse_error);
  CHECK_THROWS_AS((void)parse_distortion("copula(frank:2)"), parse_error);
}

TEST_CASE("distortion parse errors carry 1-based positions") {
  try {
    (void)parse_distortion("tvar:");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.line() == 1);
    CHECK(e.column() == 6);
  }

  try {
    (void)parse_distortion("compose(tvar:0.9");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.column() == 17);
  }

  // Range violations anchor at the offending atom, not the string start.
  try {
    (void)parse_distortion("mix(0.5*tvar:0.9,0.5*tvar:1.5)");
    FAIL("expected parse_error");
  } catch (const parse_error& e) {
    CHECK(e.column() == 22);
  }

  CHECK_THROWS_AS((void)parse_distortion("junk:1"), parse_error);
  CHECK_THROWS_AS((void)parse_distortion("tvar:0.9 trailing"), parse_error);
  CHECK_THROWS_AS((void)parse_distortion(""), parse_error);
}

TEST_CASE("distribution descriptors parse to the right laws") {
  Distribution x = parse_distribution("discrete:0:0.6,100:0.375,500:0.025");
  CHECK(near(x.mean(), 50.0, 1e-12));
  CHECK(x.quantile_lower(0.95) == 100.0);

  CHECK(near(parse_distribution("uniform:0,1").mean(), 0.5, 1e-14));
  CHECK(near(parse_distribution("pareto:2,1").survival(2.0), 0.25, 1e-14));
  CHECK(near(parse_distribution("bernoulli:0.02").mean(), 0.02, 1e-15));
  CHECK(near(parse_distribution("exponential:0.5").mean(), 2.0, 1e-12));
  CHECK(parse_distribution("normal:3,2").quantile_lower(0.5) ==
        doctest::Approx(3.0));
  CHECK(parse_distribution("lognormal:0,1").family() == Family::Lognormal);

  // Built-in worked-example tags.
  CHECK(near(parse_distribution("example:3.1X").mean(), 50.0, 1e-12));
  CHECK(near(parse_distribution("example:3.1Y").mean(), 50.0, 1e-12));
  CHECK(parse_distribution("example:4.3X").family() == Family::Uniform);

  const std::string csv = write_fixture("samples.csv", "v\n1\n2\n3\n4\n");
  CHECK(near(parse_distribution("csv:" + csv).mean(), 2.5, 1e-14));

  CHECK_THROWS_AS((void)parse_distribution("discrete:"), parse_error);
  CHECK_THROWS_AS((void)parse_distribution("pareto:2"), parse_error);
  CHECK_THROWS_AS((void)parse_distribution("example:9.9X"), parse_error);
  CHECK_THROWS_AS((void)parse_distribution("gamma:1,1"), parse_error);
  // Range violations surface as parse errors too.
  CHECK_THROWS_AS((void)parse_distribution("pareto:-2,1"), parse_error);
  CHECK_THROWS_AS((void)parse_distribution("discrete:1:0.5,2:0.6"),
                  parse_error);
}

TEST_CASE("bare copula specs parse with family aliases") {
  CHECK(parse_copula("clayton:2").family() == Copula::Family::clayton);
  CHECK(parse_copula("independence").family() ==
        Copula::Family::independence);
  CHECK(parse_copula("comonotone").family() == Copula::Family::comonotone);
  CHECK(parse_copula("countermonotone").family() ==
        Copula::Family::countermonotone);
  CHECK(parse_copula("frank:-3").param1() == -3.0);
  CHECK(parse_copula("pareto:1.5").family() ==
        Copula::Family::pareto_survival);
  CHECK(parse_copula("amh:0.5").family() == Copula::Family::amh);
  CHECK(parse_copula("gumbel:2").family() ==
        Copula::Family::gumbel_hougaard);
  CHECK(parse_copula("fgm:0.5").family() == Copula::Family::fgm);
  Copula mo = parse_copula("mo:0.3,0.6");
  CHECK(mo.family() == Copula::Family::marshall_olkin);
  CHECK(mo.param1() == 0.3);
  CHECK(mo.param2() == 0.6);
  CHECK(parse_copula("gaussian:0.5").family() == Copula::Family::gaussian);

  CHECK_THROWS_AS((void)parse_copula("clayton"), parse_error);
  CHECK_THROWS_AS((void)parse_copula("clayton:-1"), parse_error);
  CHECK_THROWS_AS((void)parse_copula("unknown:1"), parse_error);
}

TEST_CASE("cli: measure evaluates and reports json") {
  RunResult r = run_cli(
      "measure --distortion tvar:0.95 "
      "--dist discrete:0:0.6,100:0.375,500:0.025");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(near(j["value"].get<double>(), 300.0, 1e-10));
  CHECK(j["method"].get<std::string>() == "exact_stieltjes");

  RunResult mean = run_cli(
      "measure --distortion identity "
      "--dist discrete:0:0.6,100:0.375,500:0.025");
  CHECK(near(nlohmann::json::parse(mean.out)["value"].get<double>(), 50.0,
             1e-10));

  // Copula-derived distortion spec travels through the shell intact.
  RunResult cop = run_cli(
      "measure --distortion 'copula(clayton:1,v=0.5)' --dist uniform:0,1");
  CHECK(cop.code == 0);
}

TEST_CASE("cli: exit codes distinguish failure classes") {
  // Parse failures: exit 1.
  CHECK(run_cli("measure --distortion junk:1 --dist uniform:0,1").code == 1);
  CHECK(run_cli("measure --distortion tvar:0.9 --dist gamma:1,1").code == 1);
  // Missing required options are usage errors: exit 1.
  CHECK(run_cli("measure --distortion tvar:0.9").code == 1);
  // Domain violations: exit 2.
  Copula::independence();  // silence unused-include warnings in some setups
  CHECK(run_cli("subadd --distortion tvar:0.9 --joint example:4.1 "
                "--alpha 1.5")
            .code == 2);
  // Divergent integrals: exit 3.
  CHECK(run_cli("measure --distortion tvar:0.95 --dist pareto:1,1").code == 3);
  // Worked-example mismatches: exit 4 (see the bundled notes on 3.3).
  CHECK(run_cli("example 3.3").code == 4);
}

TEST_CASE("cli: curve prints an exact grid") {
  RunResult r = run_cli("curve --distortion identity --grid 3");
  CHECK(r.code == 0);
  CHECK(r.out == "u,g_u\n0,0\n0.5,0.5\n1,1\n");

  RunResult r2 = run_cli("curve --distortion tvar:0.5 --grid 5");
  CHECK(r2.code == 0);
  bool ordered = r2.out == "u,g_u\n0,0\n0.25,0.5\n0.5,1\n0.75,1\n1,1\n";
  CHECK(ordered);
}

TEST_CASE("cli: classify reports shape flags") {
  RunResult r = run_cli("classify --distortion 'copula(frank:2,v=0.5)'");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["concave"].get<bool>());
  CHECK_FALSE(j["convex"].get<bool>());

  auto v = nlohmann::json::parse(
      run_cli("classify --distortion var:0.9").out);
  CHECK_FALSE(v["concave"].get<bool>());
  CHECK_FALSE(v["convex"].get<bool>());
  CHECK(v["intervals"].size() >= 1);
}

TEST_CASE("cli: worked examples recompute cleanly") {
  for (const char* id : {"3.1", "3.2", "4.1", "4.2"}) {
    RunResult r = run_cli(std::string("example ") + id);
    CHECK(r.code == 0);
    CHECK(r.out.find("MISMATCH") == std::string::npos);
    CHECK(r.out.find(" ok") != std::string::npos);
  }
  CHECK(run_cli("example 9.9").code == 2);
}

TEST_CASE("cli: tail comparison over json joint configs") {
  const std::string como = write_fixture("como.json", R"({
    "marginals": ["discrete:0:0.6,100:0.375,500:0.025",
                   "discrete:0:0.6,100:0.39,1100:0.01"],
    "dependence": {"kind": "comonotone"}
  })");
  RunResult r = run_cli("subadd --distortion tvar:0.9 --joint " + como +
                        " --alpha 0.9");
  CHECK(r.code == 0);
  auto j = nlohmann::json::parse(r.out);
  CHECK(j["verdict"].get<std::string>() == "holds");
  CHECK(near(j["lhs"].get<double>(), j["rhs"].get<double>(), 1e-9));
  CHECK_FALSE(j["used_monte_carlo"].get<bool>());

  const std::string pmf = write_fixture("pmf.json", R"({
    "dependence": {"kind": "joint_pmf", "cells":
      [[12,12,0.01],[10,0,0.275],[0,10,0.275],[0,0,0.44]]}
  })");
  auto pj = nlohmann::json::parse(
      run_cli("subadd --distortion tvar:0.75 --joint " + pmf +
              " --alpha 0.75")
          .out);
  CHECK(pj["verdict"].get<std::string>() == "holds");
  CHECK(near(pj["lhs"].get<double>(), 0.96, 1e-9));

  const std::string cop = write_fixture("cop.json", R"({
    "marginals": ["uniform:0,1", "uniform:0,1"],
    "dependence": {"kind": "copula", "copula": "clayton:2"},
    "samples": 20000,
    "seed": 7
  })");
  auto cj = nlohmann::json::parse(
      run_cli("subadd --distortion tvar:0.95 --joint " + cop +
              " --alpha 0.95")
          .out);
  CHECK(cj["used_monte_carlo"].get<bool>());
  CHECK(cj["verdict"].get<std::string>() == "holds");

  const std::string fun = write_fixture("fun.json", R"({
    "dependence": {"kind": "functional", "maps": [
      {"edges": [0.5, 1.0], "values": [0.0, 10.0]},
      {"edges": [0.25, 1.0], "values": [1.0, 5.0]}
    ]}
  })");
  RunResult fr = run_cli("subadd --distortion tvar:0.8 --joint " + fun +
                         " --alpha 0.8");
  CHECK(fr.code == 0);

  const std::string bad = write_fixture("bad.json", R"({
    "marginals": ["uniform:0,1", "uniform:0,1"],
    "dependence": {"kind": "independent"},
    "surprise": 1
  })");
  RunResult br = run_cli("subadd --distortion tvar:0.9 --joint " + bad +
                         " --alpha 0.9");
  CHECK(br.code == 1);
  CHECK(br.out.find("surprise") != std::string::npos);

  // Sampling a copula joint without a sample count is refused as unsupported.
  const std::string cop0 = write_fixture("cop0.json", R"({
    "marginals": ["uniform:0,1", "uniform:0,1"],
    "dependence": {"kind": "copula", "copula": "clayton:2"}
  })");
  CHECK(run_cli("subadd --distortion tvar:0.95 --joint " + cop0 +
                " --alpha 0.95")
            .code == 2);
}

TEST_CASE("cli: ratio scans are reproducible and write files") {
  const std::string args =
      "ratio-scan --joint example:4.1 --p-start 0.985 --p-end 0.9999 "
      "--points 9";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("p,ratio,ci_halfwidth,method,predicted_limit", 0) == 0);

  // Monte Carlo path with a pinned seed is byte-stable too.
  const std::string mc = write_fixture("mc.json", R"({
    "marginals": ["pareto:2,1", "pareto:2,1"],
    "dependence": {"kind": "copula", "copula": "clayton:2"},
    "p_start": 0.9, "p_end": 0.999, "points": 5,
    "samples": 50000, "seed": 13
  })");
  RunResult m1 = run_cli("ratio-scan --joint " + mc);
  RunResult m2 = run_cli("ratio-scan --joint " + mc);
  CHECK(m1.code == 0);
  CHECK(m1.out == m2.out);

  auto out_file = fixture_dir() / "scan.csv";
  RunResult f = run_cli(args + " --out " + out_file.string());
  CHECK(f.code == 0);
  std::ifstream in(out_file);
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == a.out);
}
