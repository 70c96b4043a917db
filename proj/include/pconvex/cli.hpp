#pragma once

// Run configuration and pipeline driver behind the `pconvex` executable.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pconvex/domain.hpp"
#include "pconvex/harmonic.hpp"

namespace pconvex {

enum class Command { analyze, synthesize, verify, transport, levi, harmonic };
std::string to_string(Command c);
Command command_from_string(const std::string &s); // ConfigError

struct RunConfig {
  Command command = Command::analyze;
  std::optional<DomainSpec> domain;
  std::size_t p = 2;
  std::uint64_t seed = 1;
  std::size_t samples = 500;
  std::vector<double> t_values; // empty: command default
  std::string out;              // empty: standard output
  std::string format = "json";  // json | csv

  // synthesize / verify / harmonic
  std::size_t grid_interior = 2000;
  std::size_t grid_collar = 2000;
  std::size_t grid_boundary = 500;
  double margin_a = 0.1;
  std::string function; // defining-function record or synthesize report

  // harmonic
  std::string map = "catenoid_patch";
  std::optional<ParamRect> rect;
  std::optional<Vec> center;
  std::optional<double> radius;
  std::array<std::size_t, 2> map_grid{25, 20};
};

// Accepts the keys written by to_json(RunConfig); "domain" may be a string
// as for --domain or a domain object. Unknown keys are a ConfigError.
RunConfig config_from_json(const nlohmann::json &j);
// Resolved configuration: command defaults filled in, domain expanded.
nlohmann::json to_json(const RunConfig &c);

// Fills t_values and the map parameters with their command defaults and
// checks that required fields are present (ConfigError otherwise).
RunConfig resolve(RunConfig c);

struct RunResult {
  int exit_code = 2; // 0 positive, 1 negative, 2 error
  std::string report;
};

// Executes the pipeline and formats the report. Library errors are caught
// and turned into exit code 2 with the message in `diagnostic`.
RunResult execute(const RunConfig &config, std::string *diagnostic = nullptr);

// execute() plus output: the report goes to config.out or `out`, errors to
// `err`.
int run(const RunConfig &config, std::ostream &out, std::ostream &err);

ParamRect default_rect(MapTag tag);

} // namespace pconvex
