#include "pconvex/cli.hpp"

#include <fstream>
#include <numbers>
#include <ostream>
#include <set>

#include "pconvex/error.hpp"
#include "pconvex/report.hpp"

namespace pconvex {

namespace {

constexpr double kTransportTol = 1e-3;
constexpr double kSubharmonicTol = 1e-5;
constexpr double kStencilTol = 1e-3;

const char *const kCommands[] = {"analyze", "synthesize", "verify",
                                 "transport", "levi", "harmonic"};

nlohmann::json read_json_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
}

// The defining function inside a synthesize report, or a bare record.
DefiningFunction load_function(const std::string &path) {
  const nlohmann::json j = read_json_file(path);
  if (j.contains("result") && j["result"].contains("defining_function"))
    return DefiningFunction::from_json(j["result"]["defining_function"]);
  return DefiningFunction::from_json(j);
}

nlohmann::json without_samples(nlohmann::json j) {
  j.erase("samples");
  return j;
}

struct Outcome {
  bool positive = false;
  nlohmann::json result;
  std::optional<CsvTable> table;
};

SynthesisOptions synthesis_options(const RunConfig &c) {
  SynthesisOptions o;
  o.margin_a = c.margin_a;
  o.grid = {c.grid_interior, c.grid_collar, c.grid_boundary, c.seed};
  o.certify_samples = c.samples;
  return o;
}

Outcome run_analyze(const RunConfig &c) {
  const ImplicitDomain dom = make_domain(*c.domain);
  const auto pts = sample_boundary(dom, c.samples, c.seed);
  const PConvexityReport rep = certify_boundary(dom, c.p, pts);
  Outcome o;
  o.result["boundary"] = to_json(rep);
  o.positive = rep.verdict == Verdict::strongly_p_convex || rep.verdict == Verdict::p_convex;
  o.table = csv(rep, dom.dim());
  if (!c.t_values.empty()) {
    std::vector<Vec> boundary;
    for (const CurvatureSample &s : rep.samples)
      boundary.push_back(s.point);
    const LevelSetReport ls = level_set_family_check(dom, c.p, c.t_values, boundary);
    o.result["level_sets"] = to_json(ls);
    o.positive = o.positive && ls.monotone;
  }
  return o;
}

Outcome run_synthesize(const RunConfig &c) {
  const ImplicitDomain dom = make_domain(*c.domain);
  Outcome o;
  try {
    const DefiningFunction df = synthesize(dom, c.p, synthesis_options(c));
    o.result["defining_function"] = df.to_json();
    o.result["boundary"] = without_samples(to_json(*df.boundary_report));
    o.positive = df.certificate && df.certificate->passed;
    nlohmann::json flat = to_json(df.params());
    flat.erase("grid");
    flat.erase("chi_transition");
    flat.erase("phi_transition");
    const nlohmann::json cert = to_json(*df.certificate);
    for (auto it = cert.begin(); it != cert.end(); ++it)
      if (it->is_primitive())
        flat["certificate." + it.key()] = *it;
    o.table = csv_key_value(flat);
  } catch (const NotPConvex &e) {
    o.result["not_p_convex"] = e.what();
    o.positive = false;
    o.table = csv_key_value({{"not_p_convex", e.what()}});
  }
  return o;
}

Outcome run_verify(const RunConfig &c) {
  const DefiningFunction df = load_function(c.function);
  const Grid grid = make_grid(df.domain(), df.params().c,
                              {c.grid_interior, c.grid_collar, c.grid_boundary, c.seed});
  const Certificate cert = verify(df, c.p, grid);
  Outcome o;
  o.result["defining_function"] = df.to_json();
  o.result["certificate"] = to_json(cert);
  o.positive = cert.passed;
  nlohmann::json flat;
  for (auto it = o.result["certificate"].begin(); it != o.result["certificate"].end(); ++it)
    if (it->is_primitive())
      flat[it.key()] = *it;
  o.table = csv_key_value(flat);
  return o;
}

Outcome run_transport(const RunConfig &c) {
  const ImplicitDomain dom = make_domain(*c.domain);
  const auto pts = sample_boundary(dom, c.samples, c.seed);
  const ScalarField delta = delta_field(dom);
  const auto reports = sweep(pts.size(), [&](std::size_t i) {
    return curvature_transport_check(dom, pts[i], c.t_values, delta);
  });
  double worst = 0.0;
  nlohmann::json rows = nlohmann::json::array();
  for (const TransportReport &r : reports) {
    worst = std::max(worst, r.max_rel_error);
    rows.push_back(to_json(r));
  }
  Outcome o;
  o.result = {{"max_rel_error", worst}, {"tolerance", kTransportTol}, {"points", rows}};
  o.positive = worst <= kTransportTol;
  o.table = csv(reports);
  return o;
}

Outcome run_levi(const RunConfig &c) {
  const ImplicitDomain dom = make_domain(*c.domain);
  const LeviReport rep =
      level_set_levi_check(dom, c.t_values, sample_boundary(dom, c.samples, c.seed));
  Outcome o;
  o.result = to_json(rep);
  bool strong = true;
  for (const LeviLevelRow &r : rep.rows)
    strong = strong && r.min_levi > 0.0;
  o.result["interior_strongly_pseudoconvex"] = strong;
  o.positive = rep.pseudoconvex && rep.hypothesis_holds && strong;
  o.table = csv(rep);
  return o;
}

Outcome run_harmonic(const RunConfig &c) {
  const DefiningFunction df = c.function.empty()
                                  ? synthesize(make_domain(*c.domain), c.p, synthesis_options(c))
                                  : load_function(c.function);
  const auto f = ConformalHarmonicMap::fitted(map_tag_from_string(c.map), *c.rect,
                                              *c.center, *c.radius);
  const SubharmonicityReport rep =
      subharmonicity_sweep(df.field(), f, {c.map_grid[0], c.map_grid[1]});
  Outcome o;
  o.result["defining_function"] = df.to_json();
  o.result["map"] = f.to_json();
  o.result["sweep"] = to_json(rep);
  o.positive = rep.min_laplacian >= -kSubharmonicTol && rep.max_stencil_gap <= kStencilTol;
  o.table = csv(rep);
  return o;
}

template <class T> T get_as(const nlohmann::json &j, const char *key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

} // namespace

std::string to_string(Command c) { return kCommands[static_cast<int>(c)]; }

Command command_from_string(const std::string &s) {
  for (int i = 0; i < 6; ++i)
    if (s == kCommands[i])
      return static_cast<Command>(i);
  throw ConfigError("unknown command '" + s + "'");
}

ParamRect default_rect(MapTag tag) {
  constexpr double pi = std::numbers::pi;
  switch (tag) {
  case MapTag::catenoid_patch: return {0.0, 2.0 * pi, -1.0, 1.0};
  case MapTag::helicoid_patch: return {-pi, pi, -1.0, 1.0};
  default: return {-1.0, 1.0, -1.0, 1.0};
  }
}

RunConfig config_from_json(const nlohmann::json &j) {
  if (!j.is_object())
    throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "schema_version", "command", "domain", "p", "seed", "samples", "t", "out",
      "format", "grid", "margin_a", "function", "map"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown config field '" + it.key() + "'");
  RunConfig c;
  if (j.contains("command"))
    c.command = command_from_string(get_as<std::string>(j, "command"));
  if (j.contains("domain")) {
    const auto &d = j["domain"];
    c.domain = d.is_string() ? parse_domain_argument(d.get<std::string>())
                             : domain_spec_from_json(d);
  }
  if (j.contains("p"))
    c.p = get_as<std::size_t>(j, "p");
  if (j.contains("seed"))
    c.seed = get_as<std::uint64_t>(j, "seed");
  if (j.contains("samples"))
    c.samples = get_as<std::size_t>(j, "samples");
  if (j.contains("t"))
    c.t_values = get_as<std::vector<double>>(j, "t");
  if (j.contains("out"))
    c.out = get_as<std::string>(j, "out");
  if (j.contains("format"))
    c.format = get_as<std::string>(j, "format");
  if (j.contains("margin_a"))
    c.margin_a = get_as<double>(j, "margin_a");
  if (j.contains("function"))
    c.function = get_as<std::string>(j, "function");
  if (j.contains("grid")) {
    const auto &g = j["grid"];
    c.grid_interior = g.contains("interior") ? get_as<std::size_t>(g, "interior") : c.grid_interior;
    c.grid_collar = g.contains("collar") ? get_as<std::size_t>(g, "collar") : c.grid_collar;
    c.grid_boundary = g.contains("boundary") ? get_as<std::size_t>(g, "boundary") : c.grid_boundary;
  }
  if (j.contains("map")) {
    const auto &m = j["map"];
    if (m.is_string()) {
      c.map = m.get<std::string>();
    } else {
      if (m.contains("name"))
        c.map = get_as<std::string>(m, "name");
      if (m.contains("rect")) {
        const auto r = get_as<std::vector<std::vector<double>>>(m, "rect");
        if (r.size() != 2 || r[0].size() != 2 || r[1].size() != 2)
          throw ConfigError("map rect must be [[u0, u1], [v0, v1]]");
        c.rect = ParamRect{r[0][0], r[0][1], r[1][0], r[1][1]};
      }
      if (m.contains("center"))
        c.center = get_as<Vec>(m, "center");
      if (m.contains("radius"))
        c.radius = get_as<double>(m, "radius");
      if (m.contains("grid")) {
        const auto g = get_as<std::vector<std::size_t>>(m, "grid");
        if (g.size() != 2)
          throw ConfigError("map grid must be [nu, nv]");
        c.map_grid = {g[0], g[1]};
      }
    }
  }
  return c;
}

nlohmann::json to_json(const RunConfig &c) {
  nlohmann::json j;
  j["command"] = to_string(c.command);
  if (c.domain)
    j["domain"] = to_json(*c.domain);
  j["p"] = c.p;
  j["seed"] = c.seed;
  j["samples"] = c.samples;
  j["t"] = c.t_values;
  j["format"] = c.format;
  if (!c.out.empty())
    j["out"] = c.out;
  if (c.command == Command::synthesize || c.command == Command::verify ||
      c.command == Command::harmonic) {
    j["grid"] = {{"interior", c.grid_interior},
                 {"collar", c.grid_collar},
                 {"boundary", c.grid_boundary}};
    j["margin_a"] = c.margin_a;
  }
  if (!c.function.empty())
    j["function"] = c.function;
  if (c.command == Command::harmonic) {
    nlohmann::json m = {{"name", c.map}, {"grid", c.map_grid}};
    if (c.rect)
      m["rect"] = {{c.rect->u0, c.rect->u1}, {c.rect->v0, c.rect->v1}};
    if (c.center)
      m["center"] = *c.center;
    if (c.radius)
      m["radius"] = *c.radius;
    j["map"] = m;
  }
  return j;
}

RunConfig resolve(RunConfig c) {
  if (c.format != "json" && c.format != "csv")
    throw ConfigError("format must be json or csv, got '" + c.format + "'");
  if (c.samples == 0)
    throw ConfigError("samples must be positive");
  const bool needs_domain = c.command != Command::verify &&
                            !(c.command == Command::harmonic && !c.function.empty());
  if (needs_domain && !c.domain)
    throw ConfigError(to_string(c.command) + " needs --domain");
  if (c.command == Command::verify && c.function.empty())
    throw ConfigError("verify needs --function");
  if (c.domain)
    c.domain = make_domain(*c.domain).spec(); // fills name, dim and box
  if (c.t_values.empty()) {
    if (c.command == Command::transport)
      c.t_values = {-0.2, -0.1, -0.05, 0.05};
    else if (c.command == Command::levi)
      c.t_values = {-0.05, -0.1};
  }
  if (c.command == Command::harmonic) {
    const MapTag tag = map_tag_from_string(c.map);
    c.map = to_string(tag);
    if (!c.rect)
      c.rect = default_rect(tag);
    if (!c.center || !c.radius) {
      if (!c.domain)
        throw ConfigError("harmonic needs --center and --radius with --function");
      const Box box = make_domain(*c.domain).bbox();
      if (!c.center)
        c.center = box.center();
      if (!c.radius)
        c.radius = 0.25 * box.min_extent();
    }
    if (c.map_grid[0] < 1 || c.map_grid[1] < 1)
      throw ConfigError("map grid must be positive");
  }
  return c;
}

RunResult execute(const RunConfig &config, std::string *diagnostic) {
  RunResult rr;
  try {
    const RunConfig c = resolve(config);
    Outcome o;
    switch (c.command) {
    case Command::analyze: o = run_analyze(c); break;
    case Command::synthesize: o = run_synthesize(c); break;
    case Command::verify: o = run_verify(c); break;
    case Command::transport: o = run_transport(c); break;
    case Command::levi: o = run_levi(c); break;
    case Command::harmonic: o = run_harmonic(c); break;
    }
    rr.exit_code = o.positive ? 0 : 1;
    const nlohmann::json cfg = to_json(c);
    if (c.format == "csv") {
      rr.report = o.table->str({"schema_version=" + std::to_string(kSchemaVersion),
                                "command=" + to_string(c.command),
                                "seed=" + std::to_string(c.seed),
                                "status=" + std::string(o.positive ? "positive" : "negative"),
                                "config=" + cfg.dump()});
    } else {
      nlohmann::json j = {{"schema_version", kSchemaVersion},
                          {"command", to_string(c.command)},
                          {"config", cfg},
                          {"status", o.positive ? "positive" : "negative"},
                          {"exit_code", rr.exit_code},
                          {"result", o.result}};
      rr.report = j.dump(2) + "\n";
    }
  } catch (const Error &e) {
    rr.exit_code = 2;
    rr.report.clear();
    if (diagnostic)
      *diagnostic = e.what();
  } catch (const nlohmann::json::exception &e) {
    rr.exit_code = 2;
    rr.report.clear();
    if (diagnostic)
      *diagnostic = std::string("ConfigError: ") + e.what();
  } catch (const std::exception &e) {
    rr.exit_code = 2;
    rr.report.clear();
    if (diagnostic)
      *diagnostic = e.what();
  }
  return rr;
}

int run(const RunConfig &config, std::ostream &out, std::ostream &err) {
  std::string diag;
  const RunResult rr = execute(config, &diag);
  if (rr.exit_code == 2) {
    err << "pconvex: " << diag << '\n';
    return 2;
  }
  if (config.out.empty()) {
    out << rr.report;
  } else {
    std::ofstream f(config.out, std::ios::binary);
    if (!f) {
      err << "pconvex: cannot write '" << config.out << "'\n";
      return 2;
    }
    f << rr.report;
  }
  return rr.exit_code;
}

} // namespace pconvex
