#include "pconvex/report.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

nlohmann::json finite_or_null(double x) {
  return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

std::string quote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos)
    return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + "\"";
}

} // namespace

std::string format_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const PConvexityReport &r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const CurvatureSample &s : r.samples)
    samples.push_back({{"point", s.point}, {"curvatures", s.curvatures},
                       {"s_p", s.s_p}, {"refined", s.refined}});
  nlohmann::json j = {{"p", r.p},
                      {"verdict", to_string(r.verdict)},
                      {"min_sp", r.min_sp},
                      {"p_flat_points", r.p_flat_points},
                      {"samples_count", r.samples.size()}};
  if (!r.samples.empty()) {
    const CurvatureSample &w = r.samples.at(r.argmin);
    j["witness"] = {{"point", w.point}, {"curvatures", w.curvatures}, {"s_p", w.s_p}};
  }
  j["samples"] = samples;
  return j;
}

nlohmann::json to_json(const TransportReport &r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const TransportRow &x : r.rows)
    rows.push_back({{"t", x.t}, {"predicted", x.predicted}, {"measured", x.measured},
                    {"normal_eigenvalue", x.normal_eigenvalue},
                    {"max_rel_error", x.max_rel_error}});
  return {{"point", r.point}, {"curvatures", r.curvatures},
          {"max_rel_error", r.max_rel_error}, {"rows", rows}};
}

nlohmann::json to_json(const LevelSetReport &r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const LevelSetRow &x : r.rows)
    rows.push_back({{"t", x.t}, {"samples", x.samples}, {"min_sp", finite_or_null(x.min_sp)},
                    {"argmin", x.argmin}});
  return {{"p", r.p}, {"monotone", r.monotone}, {"rows", rows}};
}

nlohmann::json to_json(const NegLogDistReport &r) {
  return {{"p", r.p}, {"samples", r.samples}, {"min_value", r.min_value},
          {"argmin", r.argmin}};
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(std::vector<std::string> cells) {
  if (cells.size() != header_.size())
    throw ConfigError("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header_.size()));
  rows_.push_back(std::move(cells));
}

void CsvTable::add_row(const std::vector<double> &cells) {
  std::vector<std::string> s;
  s.reserve(cells.size());
  for (double x : cells)
    s.push_back(format_double(x));
  add_row(std::move(s));
}

std::string CsvTable::str(const std::vector<std::string> &comments) const {
  std::ostringstream os;
  for (const std::string &c : comments)
    os << "# " << c << '\n';
  auto line = [&](const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i)
      os << (i ? "," : "") << quote(cells[i]);
    os << '\n';
  };
  line(header_);
  for (const auto &r : rows_)
    line(r);
  return os.str();
}

CsvTable csv(const PConvexityReport &r, std::size_t dim) {
  std::vector<std::string> h;
  for (std::size_t i = 1; i <= dim; ++i)
    h.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i < dim; ++i)
    h.push_back("nu" + std::to_string(i));
  h.push_back("s_p");
  h.push_back("refined");
  CsvTable t(h);
  for (const CurvatureSample &s : r.samples) {
    std::vector<std::string> row;
    for (double x : s.point)
      row.push_back(format_double(x));
    for (double x : s.curvatures)
      row.push_back(format_double(x));
    row.push_back(format_double(s.s_p));
    row.push_back(s.refined ? "1" : "0");
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable csv(const std::vector<TransportReport> &reports) {
  CsvTable t({"sample", "t", "index", "curvature", "predicted", "measured", "rel_error"});
  for (std::size_t s = 0; s < reports.size(); ++s)
    for (const TransportRow &row : reports[s].rows)
      for (std::size_t i = 0; i < row.predicted.size(); ++i) {
        const double rel = std::abs(row.measured[i] - row.predicted[i]) /
                           std::max(std::abs(row.predicted[i]), 1e-6);
        t.add_row({static_cast<double>(s), row.t, static_cast<double>(i + 1),
                   reports[s].curvatures[i], row.predicted[i], row.measured[i], rel});
      }
  return t;
}

CsvTable csv(const LevelSetReport &r) {
  CsvTable t({"t", "samples", "min_sp"});
  for (const LevelSetRow &x : r.rows)
    t.add_row({x.t, static_cast<double>(x.samples), x.min_sp});
  return t;
}

CsvTable csv(const LeviReport &r) {
  CsvTable t({"t", "min_levi", "min_levi_degenerate", "degenerate_lines", "min_slack"});
  for (const LeviLevelRow &x : r.rows)
    t.add_row({x.t, x.min_levi, x.min_levi_degenerate,
               static_cast<double>(x.degenerate_lines), x.min_slack});
  return t;
}

CsvTable csv(const SubharmonicityReport &r) {
  CsvTable t({"u", "v", "rho", "laplacian", "stencil"});
  for (const HarmonicRow &x : r.rows)
    t.add_row({x.u, x.v, x.value, x.laplacian, x.stencil});
  return t;
}

CsvTable csv_key_value(const nlohmann::json &flat) {
  CsvTable t({"key", "value"});
  for (auto it = flat.begin(); it != flat.end(); ++it) {
    const auto &v = it.value();
    if (v.is_number_float())
      t.add_row({it.key(), format_double(v.get<double>())});
    else if (v.is_primitive())
      t.add_row({it.key(), v.is_string() ? v.get<std::string>() : v.dump()});
  }
  return t;
}

} // namespace pconvex
