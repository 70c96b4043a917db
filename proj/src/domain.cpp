#include "pconvex/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>
#include <map>
#include <sstream>

#include "pconvex/error.hpp"
#include "pconvex/expr.hpp"

namespace pconvex {

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < ranges.size(); ++i)
    if (x[i] < ranges[i].first || x[i] > ranges[i].second)
      return false;
  return true;
}

double Box::diameter() const {
  double s = 0.0;
  for (const auto &[lo, hi] : ranges)
    s += (hi - lo) * (hi - lo);
  return std::sqrt(s);
}

double Box::min_extent() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto &[lo, hi] : ranges)
    m = std::min(m, hi - lo);
  return m;
}

Vec Box::center() const {
  Vec c;
  for (const auto &[lo, hi] : ranges)
    c.push_back(0.5 * (lo + hi));
  return c;
}

namespace {

Box symmetric_box(const Vec &half_widths) {
  Box b;
  for (double h : half_widths)
    b.ranges.emplace_back(-h, h);
  return b;
}

double lattice_gradient_bound(const ScalarField &f, const Box &box) {
  const std::size_t n = box.dim();
  const std::size_t per_axis = n <= 3 ? 16 : (n == 4 ? 8 : 4);
  std::size_t total = 1;
  for (std::size_t i = 0; i < n; ++i)
    total *= per_axis;
  double best = 0.0;
  Vec x(n);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    for (std::size_t i = 0; i < n; ++i) {
      const auto [lo, hi] = box.ranges[i];
      // offset lattice, never hits the box center
      x[i] = lo + (hi - lo) * ((static_cast<double>(rest % per_axis) + 0.5) /
                               static_cast<double>(per_axis) +
                               0.013);
      rest /= per_axis;
    }
    try {
      best = std::max(best, norm(f.gradient(x)));
    } catch (const EvaluationError &) {
    }
  }
  // also the box corners, where polynomial gradients peak
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i)
      x[i] = (mask >> i) & 1 ? box.ranges[i].second : box.ranges[i].first;
    try {
      best = std::max(best, norm(f.gradient(x)));
    } catch (const EvaluationError &) {
    }
  }
  return 1.25 * best;
}

// -- analytic catalog fields ------------------------------------------------

ScalarField ball_field(double r, std::size_t n) {
  return ScalarField(n, [r](std::span<const double> x, int order) {
    Jet j;
    j.value = dot(x, x) - r * r;
    if (order >= 1)
      j.gradient = scaled(x, 2.0);
    if (order >= 2)
      j.hessian = 2.0 * SymMatrix::identity(x.size());
    return j;
  });
}

ScalarField ellipsoid_field(Vec axes) {
  const std::size_t n = axes.size();
  return ScalarField(n, [axes](std::span<const double> x, int order) {
    Jet j;
    const std::size_t n = axes.size();
    j.value = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      j.value += x[i] * x[i] / (axes[i] * axes[i]);
    if (order >= 1) {
      j.gradient.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        j.gradient[i] = 2.0 * x[i] / (axes[i] * axes[i]);
    }
    if (order >= 2) {
      j.hessian = SymMatrix(n);
      for (std::size_t i = 0; i < n; ++i)
        j.hessian.set(i, i, 2.0 / (axes[i] * axes[i]));
    }
    return j;
  });
}

ScalarField torus_field(double ring, double tube) {
  return ScalarField(3, [ring, tube](std::span<const double> x, int order) {
    Jet j;
    const double s = std::hypot(x[0], x[1]);
    const double d = s - ring;
    j.value = d * d + x[2] * x[2] - tube * tube;
    if (order >= 1) {
      if (s == 0.0)
        throw EvaluationError("torus field is not differentiable on its axis");
      j.gradient = {2.0 * d * x[0] / s, 2.0 * d * x[1] / s, 2.0 * x[2]};
    }
    if (order >= 2) {
      const double s2 = s * s, s3 = s2 * s;
      j.hessian = SymMatrix(3);
      j.hessian.set(0, 0, 2.0 * (x[0] * x[0] / s2 + d * x[1] * x[1] / s3));
      j.hessian.set(1, 1, 2.0 * (x[1] * x[1] / s2 + d * x[0] * x[0] / s3));
      j.hessian.set(0, 1, 2.0 * (x[0] * x[1] / s2 - d * x[0] * x[1] / s3));
      j.hessian.set(2, 2, 2.0);
    }
    return j;
  });
}

ScalarField perturbed_ball_field(double r, double amp, double freq,
                                 std::size_t n) {
  return ScalarField(n, [=](std::span<const double> x, int order) {
    Jet j;
    const double arg = freq * x[0] / r;
    j.value = dot(x, x) - r * r + amp * r * r * std::cos(arg);
    if (order >= 1) {
      j.gradient = scaled(x, 2.0);
      j.gradient[0] -= amp * r * freq * std::sin(arg);
    }
    if (order >= 2) {
      j.hessian = 2.0 * SymMatrix::identity(x.size());
      j.hessian.add_to(0, 0, -amp * freq * freq * std::cos(arg));
    }
    return j;
  });
}

ScalarField complex_egg_field(int k) {
  return ScalarField(4, [k](std::span<const double> x, int order) {
    Jet j;
    const double u = x[0] * x[0] + x[1] * x[1];
    j.value = std::pow(u, k) + x[2] * x[2] + x[3] * x[3] - 1.0;
    // d/dx_i u^k = 2k u^(k-1) x_i
    const double d1 = k * std::pow(u, k - 1);
    if (order >= 1)
      j.gradient = {2.0 * d1 * x[0], 2.0 * d1 * x[1], 2.0 * x[2], 2.0 * x[3]};
    if (order >= 2) {
      const double d2 = k >= 2 ? 4.0 * k * (k - 1) * std::pow(u, k - 2) : 0.0;
      j.hessian = SymMatrix(4);
      j.hessian.set(0, 0, 2.0 * d1 + d2 * x[0] * x[0]);
      j.hessian.set(1, 1, 2.0 * d1 + d2 * x[1] * x[1]);
      j.hessian.set(0, 1, d2 * x[0] * x[1]);
      j.hessian.set(2, 2, 2.0);
      j.hessian.set(3, 3, 2.0);
    }
    return j;
  });
}

ScalarField hartogs_field(double m) {
  return ScalarField(4, [m](std::span<const double> x, int order) {
    Jet j;
    const double u = x[0] * x[0] + x[1] * x[1];
    j.value = x[2] + x[0] * x[0] - x[1] * x[1] + x[2] * x[2] + x[3] * x[3] +
              u * u + m;
    if (order >= 1)
      j.gradient = {2.0 * x[0] + 4.0 * u * x[0], -2.0 * x[1] + 4.0 * u * x[1],
                    1.0 + 2.0 * x[2], 2.0 * x[3]};
    if (order >= 2) {
      j.hessian = SymMatrix(4);
      j.hessian.set(0, 0, 2.0 + 4.0 * u + 8.0 * x[0] * x[0]);
      j.hessian.set(1, 1, -2.0 + 4.0 * u + 8.0 * x[1] * x[1]);
      j.hessian.set(0, 1, 8.0 * x[0] * x[1]);
      j.hessian.set(2, 2, 2.0);
      j.hessian.set(3, 3, 2.0);
    }
    return j;
  });
}

void require(bool ok, const std::string &msg) {
  if (!ok)
    throw CatalogError(msg);
}

std::size_t dim_param(const std::vector<double> &p, std::size_t idx,
                      std::size_t fallback) {
  if (p.size() <= idx)
    return fallback;
  const double d = p[idx];
  require(d >= 2.0 && d == std::floor(d), "dimension must be an integer >= 2");
  return static_cast<std::size_t>(d);
}

// Named parameters per catalog kind, in positional order. A trailing '?'
// marks an optional parameter; "axes" is a list.
const std::map<std::string, std::vector<std::string>> &param_names() {
  static const std::map<std::string, std::vector<std::string>> names = {
      {"ball", {"R", "dim?"}},
      {"ellipsoid", {"axes"}},
      {"solid_torus", {"R_ring", "r_tube"}},
      {"perturbed_ball", {"R", "amp", "freq", "dim?"}},
      {"complex_egg", {"k"}},
      {"hartogs_example", {"m?"}},
  };
  return names;
}

} // namespace

ImplicitDomain::ImplicitDomain(DomainSpec spec, ScalarField rho0, Box bbox)
    : spec_(std::move(spec)), rho0_(std::move(rho0)), bbox_(std::move(bbox)) {
  if (bbox_.dim() != rho0_.dim())
    throw DimensionError("bounding box dimension does not match the field");
  spec_.dim = rho0_.dim();
  spec_.bbox = bbox_;
  grad_bound_ = lattice_gradient_bound(rho0_, bbox_);
}

ImplicitDomain catalog(const std::string &kind,
                       const std::vector<double> &p) {
  DomainSpec spec;
  spec.catalog_kind = kind;
  spec.catalog_params = p;
  std::ostringstream name;
  name << kind;
  if (!p.empty()) {
    name << "(";
    for (std::size_t i = 0; i < p.size(); ++i)
      name << (i ? "," : "") << p[i];
    name << ")";
  }
  spec.name = name.str();

  if (kind == "ball") {
    require(!p.empty() && p.size() <= 2, "ball takes R [, dim]");
    require(p[0] > 0.0, "ball radius must be positive");
    const std::size_t n = dim_param(p, 1, 3);
    return ImplicitDomain(spec, ball_field(p[0], n),
                          symmetric_box(Vec(n, 1.1 * p[0])));
  }
  if (kind == "ellipsoid") {
    require(p.size() >= 2, "ellipsoid needs at least two semi-axes");
    for (double a : p)
      require(a > 0.0, "ellipsoid semi-axes must be positive");
    return ImplicitDomain(spec, ellipsoid_field(p), symmetric_box(scaled(p, 1.1)));
  }
  if (kind == "solid_torus") {
    require(p.size() == 2, "solid_torus takes R_ring, r_tube");
    require(p[0] > 0.0 && p[1] > 0.0, "torus radii must be positive");
    require(p[0] > p[1], "solid_torus needs R_ring > r_tube");
    const double xy = 1.1 * (p[0] + p[1]);
    return ImplicitDomain(spec, torus_field(p[0], p[1]),
                          symmetric_box({xy, xy, 1.1 * p[1]}));
  }
  if (kind == "perturbed_ball") {
    require(p.size() >= 3 && p.size() <= 4,
            "perturbed_ball takes R, amp, freq [, dim]");
    require(p[0] > 0.0, "perturbed_ball radius must be positive");
    require(p[1] >= 0.0 && p[1] < 1.0, "perturbed_ball needs 0 <= amp < 1");
    require(p[2] >= 0.0, "perturbed_ball needs freq >= 0");
    const std::size_t n = dim_param(p, 3, 3);
    return ImplicitDomain(spec, perturbed_ball_field(p[0], p[1], p[2], n),
                          symmetric_box(Vec(n, 1.1 * p[0] * std::sqrt(1.0 + p[1]))));
  }
  if (kind == "complex_egg") {
    require(p.size() == 1, "complex_egg takes k");
    require(p[0] >= 1.0 && p[0] == std::floor(p[0]),
            "complex_egg needs an integer k >= 1");
    return ImplicitDomain(spec, complex_egg_field(static_cast<int>(p[0])),
                          symmetric_box({1.1, 1.1, 1.1, 1.1}));
  }
  if (kind == "hartogs_example") {
    require(p.size() <= 1, "hartogs_example takes [m]");
    const double m = p.empty() ? 0.0 : p[0];
    require(m < 0.25, "hartogs_example needs m < 1/4 to be nonempty");
    // |w + 1/2|^2 <= 1/2 - m and |z|^2 <= (1 + sqrt(2 - 4m)) / 2 on D.
    const double wr = std::sqrt(0.5 - m);
    const double zr = std::sqrt(0.5 * (1.0 + std::sqrt(2.0 - 4.0 * m)));
    Box b;
    const double pad = 0.1;
    b.ranges = {{-zr - pad, zr + pad},
                {-zr - pad, zr + pad},
                {-0.5 - wr - pad, -0.5 + wr + pad},
                {-wr - pad, wr + pad}};
    return ImplicitDomain(spec, hartogs_field(m), b);
  }
  throw CatalogError("unknown catalog domain '" + kind + "'");
}

ImplicitDomain make_domain(const DomainSpec &spec) {
  if (!spec.catalog_kind.empty()) {
    ImplicitDomain d = catalog(spec.catalog_kind, spec.catalog_params);
    if (spec.bbox || !spec.name.empty()) {
      DomainSpec s = d.spec();
      if (!spec.name.empty())
        s.name = spec.name;
      return ImplicitDomain(s, d.rho0(), spec.bbox ? *spec.bbox : d.bbox());
    }
    return d;
  }
  if (!spec.expr)
    throw ConfigError("domain spec needs either 'expr' or 'catalog'");
  if (!spec.bbox)
    throw ConfigError("expression domains need a 'bbox'");
  if (spec.dim < 1)
    throw ConfigError("expression domains need 'dim'");
  if (spec.bbox->dim() != spec.dim)
    throw ConfigError("bbox has " + std::to_string(spec.bbox->dim()) +
                      " ranges for dim " + std::to_string(spec.dim));
  return ImplicitDomain(spec, parse_field(*spec.expr, spec.dim), *spec.bbox);
}

DomainSpec domain_spec_from_json(const nlohmann::json &j) {
  DomainSpec s;
  try {
    s.name = j.value("name", std::string{});
    s.dim = j.value("dim", std::size_t{0});
    if (j.contains("expr"))
      s.expr = j.at("expr").get<std::string>();
    if (j.contains("catalog")) {
      const auto &c = j.at("catalog");
      s.catalog_kind = c.at("kind").get<std::string>();
      if (c.contains("params")) {
        const auto &p = c.at("params");
        if (p.is_array()) {
          s.catalog_params = p.get<std::vector<double>>();
        } else if (p.is_object()) {
          auto it = param_names().find(s.catalog_kind);
          if (it == param_names().end())
            throw CatalogError("unknown catalog domain '" + s.catalog_kind + "'");
          for (std::string key : it->second) {
            const bool optional = key.back() == '?';
            if (optional)
              key.pop_back();
            if (!p.contains(key)) {
              if (optional)
                break;
              throw ConfigError("catalog parameter '" + key + "' missing");
            }
            if (p.at(key).is_array())
              for (double v : p.at(key).get<std::vector<double>>())
                s.catalog_params.push_back(v);
            else
              s.catalog_params.push_back(p.at(key).get<double>());
          }
        } else {
          throw ConfigError("catalog params must be an array or object");
        }
      }
    }
    if (j.contains("bbox")) {
      Box b;
      for (const auto &r : j.at("bbox")) {
        if (r.size() != 2)
          throw ConfigError("bbox entries must be [lo, hi]");
        b.ranges.emplace_back(r[0].get<double>(), r[1].get<double>());
      }
      s.bbox = b;
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("malformed domain spec: ") + e.what());
  }
  if (s.expr && !s.catalog_kind.empty())
    throw ConfigError("domain spec has both 'expr' and 'catalog'");
  return s;
}

nlohmann::json to_json(const DomainSpec &spec) {
  nlohmann::json j;
  j["name"] = spec.name;
  j["dim"] = spec.dim;
  if (spec.expr)
    j["expr"] = *spec.expr;
  if (!spec.catalog_kind.empty())
    j["catalog"] = {{"kind", spec.catalog_kind},
                    {"params", spec.catalog_params}};
  if (spec.bbox) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto &[lo, hi] : spec.bbox->ranges)
      b.push_back({lo, hi});
    j["bbox"] = b;
  }
  return j;
}

DomainSpec parse_domain_argument(const std::string &arg) {
  const std::string prefix = "catalog:";
  if (arg.rfind(prefix, 0) == 0) {
    const std::string rest = arg.substr(prefix.size());
    const auto colon = rest.find(':');
    DomainSpec s;
    s.catalog_kind = rest.substr(0, colon);
    if (colon != std::string::npos) {
      std::stringstream ss(rest.substr(colon + 1));
      std::string tok;
      while (std::getline(ss, tok, ',')) {
        try {
          std::size_t used = 0;
          s.catalog_params.push_back(std::stod(tok, &used));
          if (used != tok.size())
            throw std::invalid_argument(tok);
        } catch (const std::exception &) {
          throw ConfigError("bad catalog parameter '" + tok + "' in " + arg);
        }
      }
    }
    return s;
  }
  nlohmann::json j;
  try {
    if (!arg.empty() && arg.front() == '{') {
      j = nlohmann::json::parse(arg);
    } else {
      std::ifstream in(arg);
      if (!in)
        throw ConfigError("cannot open domain file '" + arg + "'");
      j = nlohmann::json::parse(in);
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("invalid domain JSON: ") + e.what());
  }
  return domain_spec_from_json(j);
}

} // namespace pconvex
