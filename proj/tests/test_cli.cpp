#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "pconvex/cli.hpp"
#include "pconvex/error.hpp"

using namespace pconvex;

namespace {

RunConfig analyze(const std::string &domain) {
  RunConfig c;
  c.command = Command::analyze;
  c.domain = parse_domain_argument(domain);
  c.samples = 120;
  return c;
}

std::vector<std::string> comment_lines(const std::string &csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  for (std::string line; std::getline(in, line) && line.rfind("# ", 0) == 0;)
    out.push_back(line.substr(2));
  return out;
}

} // namespace

TEST_CASE("config from json") {
  const nlohmann::json j = {{"command", "transport"},
                            {"domain", "catalog:ellipsoid:1,2,3"},
                            {"p", 2},
                            {"seed", 7},
                            {"t", {-0.1, 0.05}},
                            {"format", "csv"}};
  const RunConfig c = config_from_json(j);
  CHECK(c.command == Command::transport);
  CHECK(c.seed == 7);
  CHECK(c.t_values == std::vector<double>{-0.1, 0.05});
  CHECK(c.format == "csv");
  REQUIRE(c.domain);
  CHECK(c.domain->catalog_kind == "ellipsoid");

  CHECK_THROWS_AS(config_from_json({{"command", "analyze"}, {"colour", 1}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"command", "bake"}}), ConfigError);
  CHECK_THROWS_AS(config_from_json({{"command", "analyze"}, {"p", "two"}}), ConfigError);
  CHECK_THROWS_AS(
      config_from_json({{"command", "harmonic"}, {"map", {{"rect", {1, 2, 3}}}}}),
      ConfigError);
}

TEST_CASE("resolved config round-trips") {
  RunConfig c;
  c.command = Command::harmonic;
  c.domain = parse_domain_argument("catalog:ball:1");
  c.map = "catenoid";
  const RunConfig r = resolve(c);
  CHECK(r.map == "catenoid_patch");
  REQUIRE(r.center);
  REQUIRE(r.radius);
  CHECK(*r.radius == doctest::Approx(0.55));
  CHECK(r.domain->dim == 3);

  const RunConfig back = resolve(config_from_json(to_json(r)));
  CHECK(to_json(back) == to_json(r));
}

TEST_CASE("command defaults") {
  RunConfig c;
  c.command = Command::transport;
  c.domain = parse_domain_argument("catalog:ball:1");
  CHECK(resolve(c).t_values == std::vector<double>{-0.2, -0.1, -0.05, 0.05});
  c.command = Command::levi;
  CHECK(resolve(c).t_values == std::vector<double>{-0.05, -0.1});

  RunConfig bare;
  bare.command = Command::analyze;
  CHECK_THROWS_AS(resolve(bare), ConfigError);
  bare.command = Command::verify;
  CHECK_THROWS_AS(resolve(bare), ConfigError);
  c.format = "xml";
  CHECK_THROWS_AS(resolve(c), ConfigError);
}

TEST_CASE("exit codes") {
  CHECK(execute(analyze("catalog:solid_torus:2.5,1")).exit_code == 0);
  CHECK(execute(analyze("catalog:solid_torus:1.5,1")).exit_code == 1);

  RunConfig bad;
  bad.command = Command::analyze;
  bad.domain = DomainSpec{};
  bad.domain->catalog_kind = "teapot";
  std::string diag;
  const RunResult r = execute(bad, &diag);
  CHECK(r.exit_code == 2);
  CHECK(r.report.empty());
  CHECK(diag.find("teapot") != std::string::npos);

  RunConfig synth;
  synth.command = Command::synthesize;
  synth.domain = parse_domain_argument("catalog:solid_torus:1.5,1");
  synth.samples = 100;
  CHECK(execute(synth).exit_code == 1);
}

TEST_CASE("reports are deterministic and versioned") {
  RunConfig c = analyze("catalog:ellipsoid:1,2,3");
  c.t_values = {0.0, -0.1};
  const RunResult a = execute(c);
  const RunResult b = execute(c);
  REQUIRE(a.exit_code == 0);
  CHECK(a.report == b.report);

  const auto j = nlohmann::json::parse(a.report);
  CHECK(j["schema_version"] == 1);
  CHECK(j["command"] == "analyze");
  CHECK(j["status"] == "positive");
  CHECK(j["config"]["seed"] == 1);
  CHECK(j["config"]["domain"]["name"] == "ellipsoid(1,2,3)");
  // refinement appends samples around the minimiser
  CHECK(j["result"]["boundary"]["samples_count"] >= 120);
  CHECK(j["result"]["level_sets"]["monotone"] == true);

  c.seed = 2;
  CHECK(execute(c).report != a.report);
}

TEST_CASE("csv carries seed and config") {
  RunConfig c = analyze("catalog:ball:1");
  c.format = "csv";
  const RunResult r = execute(c);
  REQUIRE(r.exit_code == 0);
  const auto comments = comment_lines(r.report);
  REQUIRE(comments.size() == 5);
  CHECK(comments[0] == "schema_version=1");
  CHECK(comments[2] == "seed=1");
  CHECK(comments[4].rfind("config=", 0) == 0);
  const auto cfg = nlohmann::json::parse(comments[4].substr(7));
  CHECK(cfg["seed"] == 1);

  std::istringstream in(r.report);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#')
      ++rows;
  const auto js = nlohmann::json::parse(execute(analyze("catalog:ball:1")).report);
  CHECK(rows == js["result"]["boundary"]["samples_count"].get<std::size_t>() + 1);
}

TEST_CASE("synthesize then verify through a file") {
  const std::string path = "test_cli_rho.json";
  RunConfig s;
  s.command = Command::synthesize;
  s.domain = parse_domain_argument("catalog:ball:1");
  s.grid_interior = s.grid_collar = 300;
  s.grid_boundary = 100;
  s.out = path;
  std::ostringstream out, err;
  REQUIRE(run(s, out, err) == 0);
  CHECK(out.str().empty());

  RunConfig v;
  v.command = Command::verify;
  v.function = path;
  v.seed = 9;
  v.grid_interior = v.grid_collar = 300;
  v.grid_boundary = 100;
  const RunResult r = execute(v);
  CHECK(r.exit_code == 0);
  const auto j = nlohmann::json::parse(r.report);
  CHECK(j["result"]["certificate"]["passed"] == true);
  CHECK(j["result"]["defining_function"]["params"]["a"] == doctest::Approx(0.1));
  std::remove(path.c_str());

  v.function = "no/such/file.json";
  CHECK(execute(v).exit_code == 2);
}
