#pragma once

// JSON and CSV emission shared by the command-line front end. Reports carry
// a schema version and are byte-identical for identical inputs: no
// timestamps, doubles printed with round-trip precision.

#include <string>
#include <vector>

#include <json.hpp>

#include "pconvex/harmonic.hpp"
#include "pconvex/levi.hpp"
#include "pconvex/synthesis.hpp"

namespace pconvex {

inline constexpr int kSchemaVersion = 1;

nlohmann::json to_json(const PConvexityReport &r);
nlohmann::json to_json(const TransportReport &r);
nlohmann::json to_json(const LevelSetReport &r);
nlohmann::json to_json(const NegLogDistReport &r);

// Shortest text that reads back to the same double.
std::string format_double(double x);

class CsvTable {
public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(std::vector<std::string> cells); // ConfigError on width mismatch
  void add_row(const std::vector<double> &cells);
  // Comment lines ("# key=value") precede the header.
  std::string str(const std::vector<std::string> &comments = {}) const;

private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

CsvTable csv(const PConvexityReport &r, std::size_t dim);
CsvTable csv(const std::vector<TransportReport> &r);
CsvTable csv(const LevelSetReport &r);
CsvTable csv(const LeviReport &r);
CsvTable csv(const SubharmonicityReport &r);
// One key,value row per scalar entry of a flat JSON object.
CsvTable csv_key_value(const nlohmann::json &flat);

} // namespace pconvex
