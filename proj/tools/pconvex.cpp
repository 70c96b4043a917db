// pconvex: command-line front end.
//
//   pconvex analyze --domain catalog:solid_torus:2.5,1 --p 2 --samples 500 --seed 1
//   pconvex synthesize --domain catalog:ball:1 --p 2 --out rho.json
//   pconvex verify --function rho.json
//   pconvex --config run.json
//
// Exit status: 0 positive verdict, 1 negative verdict, 2 error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pconvex/cli.hpp"
#include "pconvex/error.hpp"

namespace {

struct Flags {
  std::string domain, out, format, function, map, config;
  std::size_t p = 0, samples = 0, interior = 0, collar = 0, boundary = 0;
  std::uint64_t seed = 0;
  std::vector<double> t, center, rect;
  std::vector<std::size_t> grid;
  double margin_a = 0.0, radius = 0.0;
};

void add_options(CLI::App &app, Flags &f) {
  app.add_option("--config", f.config, "RunConfig JSON file; flags override it");
  app.add_option("--domain", f.domain,
                 "catalog:kind:p1,p2,..., a domain JSON file, or inline JSON");
  app.add_option("--p", f.p, "plane dimension p");
  app.add_option("--seed", f.seed, "random seed");
  app.add_option("--samples", f.samples, "boundary sample count");
  app.add_option("--t", f.t, "level offsets t, comma separated (use --t=-0.1,...)")
      ->delimiter(',');
  app.add_option("--out", f.out, "report path (default: standard output)");
  app.add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--interior", f.interior, "interior grid samples");
  app.add_option("--collar", f.collar, "collar grid samples");
  app.add_option("--boundary", f.boundary, "boundary grid samples");
  app.add_option("--margin-a", f.margin_a, "margin added to the convexifying rate a");
  app.add_option("--function", f.function, "defining-function record or synthesize report");
  app.add_option("--map", f.map, "affine_plane, catenoid, helicoid or enneper");
  app.add_option("--rect", f.rect, "parameter rectangle u0,u1,v0,v1")
      ->delimiter(',')
      ->expected(4);
  app.add_option("--center", f.center, "centre of the ball the patch is fitted into")
      ->delimiter(',');
  app.add_option("--radius", f.radius, "radius of that ball");
  app.add_option("--grid", f.grid, "parameter lattice nu,nv")->delimiter(',')->expected(2);
}

pconvex::RunConfig build_config(const CLI::App &app, const Flags &f,
                                const std::string &command) {
  using namespace pconvex;
  RunConfig c;
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in)
      throw ConfigError("cannot open '" + f.config + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError("'" + f.config + "' is not valid JSON: " + e.what());
    }
    c = config_from_json(j);
  } else if (command.empty()) {
    throw ConfigError("give a command or --config");
  }
  if (!command.empty())
    c.command = command_from_string(command);
  auto given = [&](const char *name) { return app.count(name) > 0; };
  if (given("--domain"))
    c.domain = parse_domain_argument(f.domain);
  if (given("--p"))
    c.p = f.p;
  if (given("--seed"))
    c.seed = f.seed;
  if (given("--samples"))
    c.samples = f.samples;
  if (given("--t"))
    c.t_values = f.t;
  if (given("--out"))
    c.out = f.out;
  if (given("--format"))
    c.format = f.format;
  if (given("--interior"))
    c.grid_interior = f.interior;
  if (given("--collar"))
    c.grid_collar = f.collar;
  if (given("--boundary"))
    c.grid_boundary = f.boundary;
  if (given("--margin-a"))
    c.margin_a = f.margin_a;
  if (given("--function"))
    c.function = f.function;
  if (given("--map"))
    c.map = f.map;
  if (given("--rect"))
    c.rect = ParamRect{f.rect[0], f.rect[1], f.rect[2], f.rect[3]};
  if (given("--center"))
    c.center = f.center;
  if (given("--radius"))
    c.radius = f.radius;
  if (given("--grid"))
    c.map_grid = {f.grid[0], f.grid[1]};
  return c;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"p-convexity analysis and p-plurisubharmonic defining functions"};
  app.require_subcommand(0, 1);
  Flags top;
  add_options(app, top);

  const std::pair<const char *, const char *> commands[] = {
      {"analyze", "certify boundary p-convexity from sampled principal curvatures"},
      {"synthesize", "build and certify a p-psh defining function"},
      {"verify", "re-certify a saved defining function on a fresh grid"},
      {"transport", "check curvature transport along normal lines"},
      {"levi", "Levi forms of the boundary and of interior level sets"},
      {"harmonic", "subharmonicity along a conformal harmonic patch"},
  };
  std::vector<std::pair<CLI::App *, Flags>> subs;
  subs.reserve(6);
  for (const auto &[name, help] : commands) {
    subs.emplace_back(app.add_subcommand(name, help), Flags{});
  }
  for (auto &[sub, flags] : subs)
    add_options(*sub, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    pconvex::RunConfig config;
    bool found = false;
    for (auto &[sub, flags] : subs)
      if (sub->parsed()) {
        config = build_config(*sub, flags, sub->get_name());
        found = true;
      }
    if (!found)
      config = build_config(app, top, "");
    return pconvex::run(config, std::cout, std::cerr);
  } catch (const pconvex::Error &e) {
    std::cerr << "pconvex: " << e.what() << '\n';
    return 2;
  }
}
