#include "pconvex/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

std::string point_string(std::span<const double> x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i)
    os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

using V3 = std::array<double, 3>;

struct Jet3 {
  V3 g{}, gu{}, gv{}, guu{}, guv{}, gvv{};
};

Jet3 surface(MapTag tag, double u, double v) {
  Jet3 s;
  switch (tag) {
  case MapTag::affine_plane:
    s.g = {u, v, 0.0};
    s.gu = {1.0, 0.0, 0.0};
    s.gv = {0.0, 1.0, 0.0};
    break;
  case MapTag::catenoid_patch: {
    const double ch = std::cosh(v), sh = std::sinh(v);
    const double c = std::cos(u), sn = std::sin(u);
    s.g = {ch * c, ch * sn, v};
    s.gu = {-ch * sn, ch * c, 0.0};
    s.gv = {sh * c, sh * sn, 1.0};
    s.guu = {-ch * c, -ch * sn, 0.0};
    s.guv = {-sh * sn, sh * c, 0.0};
    s.gvv = {ch * c, ch * sn, 0.0};
    break;
  }
  case MapTag::helicoid_patch: {
    const double ch = std::cosh(v), sh = std::sinh(v);
    const double c = std::cos(u), sn = std::sin(u);
    s.g = {sh * c, sh * sn, u};
    s.gu = {-sh * sn, sh * c, 1.0};
    s.gv = {ch * c, ch * sn, 0.0};
    s.guu = {-sh * c, -sh * sn, 0.0};
    s.guv = {-ch * sn, ch * c, 0.0};
    s.gvv = {sh * c, sh * sn, 0.0};
    break;
  }
  case MapTag::enneper_patch:
    s.g = {u - u * u * u / 3.0 + u * v * v, v - v * v * v / 3.0 + u * u * v,
           u * u - v * v};
    s.gu = {1.0 - u * u + v * v, 2.0 * u * v, 2.0 * u};
    s.gv = {2.0 * u * v, 1.0 - v * v + u * u, -2.0 * v};
    s.guu = {-2.0 * u, 2.0 * v, 2.0};
    s.guv = {2.0 * v, 2.0 * u, 0.0};
    s.gvv = {2.0 * u, -2.0 * v, -2.0};
    break;
  }
  return s;
}

} // namespace

std::string to_string(MapTag tag) {
  switch (tag) {
  case MapTag::affine_plane: return "affine_plane";
  case MapTag::catenoid_patch: return "catenoid_patch";
  case MapTag::helicoid_patch: return "helicoid_patch";
  case MapTag::enneper_patch: return "enneper_patch";
  }
  return "?";
}

MapTag map_tag_from_string(const std::string &s) {
  for (MapTag t : {MapTag::affine_plane, MapTag::catenoid_patch,
                   MapTag::helicoid_patch, MapTag::enneper_patch})
    if (s == to_string(t) || s + "_patch" == to_string(t))
      return t;
  throw ConfigError("unknown map '" + s +
                    "' (affine_plane, catenoid, helicoid, enneper)");
}

std::string to_string(Dichotomy d) {
  switch (d) {
  case Dichotomy::interior: return "interior";
  case Dichotomy::boundary: return "boundary";
  case Dichotomy::mixed: return "mixed";
  }
  return "?";
}

ConformalHarmonicMap::ConformalHarmonicMap(MapTag tag, ParamRect rect, std::size_t n)
    : tag_(tag), rect_(rect), n_(n), offset_(n, 0.0) {
  if (n < 3)
    throw DimensionError("harmonic patches need n >= 3, got " + std::to_string(n));
  if (!(rect.u1 > rect.u0) || !(rect.v1 > rect.v0))
    throw ConfigError("empty parameter rectangle");
  for (std::size_t k = 0; k < 3; ++k)
    axes_[k] = unit_vector(n, k);
}

void ConformalHarmonicMap::set_transform(double scale, Vec offset) {
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw ConfigError("map scale must be positive");
  if (offset.size() != n_)
    throw DimensionError("map offset has the wrong dimension");
  scale_ = scale;
  offset_ = std::move(offset);
}

void ConformalHarmonicMap::set_axes(std::array<Vec, 3> axes) {
  for (const Vec &a : axes)
    if (a.size() != n_)
      throw DimensionError("map axis has the wrong dimension");
  // Frame validates orthonormality
  Frame(n_, {axes[0], axes[1], axes[2]}, 1e-12);
  axes_ = std::move(axes);
}

ConformalHarmonicMap ConformalHarmonicMap::fitted(MapTag tag, ParamRect rect,
                                                  const Vec &center, double radius) {
  if (!(radius > 0.0))
    throw ConfigError("fit radius must be positive");
  ConformalHarmonicMap f(tag, rect, center.size());
  const std::size_t m = 101;
  std::vector<V3> pts;
  pts.reserve(m * m);
  V3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = 0; k < m; ++k) {
      const double u = rect.u0 + (rect.u1 - rect.u0) * i / (m - 1.0);
      const double v = rect.v0 + (rect.v1 - rect.v0) * k / (m - 1.0);
      const V3 g = surface(tag, u, v).g;
      pts.push_back(g);
      for (int d = 0; d < 3; ++d) {
        lo[d] = std::min(lo[d], g[d]);
        hi[d] = std::max(hi[d], g[d]);
      }
    }
  const V3 mid = {0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1]), 0.5 * (lo[2] + hi[2])};
  double r = 0.0;
  for (const V3 &g : pts)
    r = std::max(r, std::hypot(g[0] - mid[0], g[1] - mid[1], g[2] - mid[2]));
  // lattice gaps: the image between lattice points is at most one cell away
  r *= 1.02;
  const double s = radius / r;
  Vec off = center;
  for (int d = 0; d < 3; ++d)
    off[d] -= s * mid[d];
  f.set_transform(s, off);
  return f;
}

MapJet ConformalHarmonicMap::jet(double u, double v) const {
  Jet3 g = surface(tag_, u, v);
  if (bump_.amplitude != 0.0) {
    const double w2 = bump_.width * bump_.width;
    const double du = u - bump_.uc, dv = v - bump_.vc;
    const double e = bump_.amplitude * std::exp(-(du * du + dv * dv) / w2);
    g.g[2] += e;
    g.gu[2] += -2.0 * du / w2 * e;
    g.gv[2] += -2.0 * dv / w2 * e;
    g.guu[2] += (4.0 * du * du / (w2 * w2) - 2.0 / w2) * e;
    g.gvv[2] += (4.0 * dv * dv / (w2 * w2) - 2.0 / w2) * e;
    g.guv[2] += 4.0 * du * dv / (w2 * w2) * e;
  }
  auto embed = [&](const V3 &a, bool translate) {
    Vec out = translate ? offset_ : Vec(n_, 0.0);
    for (std::size_t k = 0; k < 3; ++k)
      if (a[k] != 0.0)
        out = axpy(out, scale_ * a[k], axes_[k]);
    return out;
  };
  MapJet j;
  j.f = embed(g.g, true);
  j.fu = embed(g.gu, false);
  j.fv = embed(g.gv, false);
  j.fuu = embed(g.guu, false);
  j.fuv = embed(g.guv, false);
  j.fvv = embed(g.gvv, false);
  return j;
}

nlohmann::json ConformalHarmonicMap::to_json() const {
  nlohmann::json j;
  j["map"] = to_string(tag_);
  j["rect"] = {{rect_.u0, rect_.u1}, {rect_.v0, rect_.v1}};
  j["dim"] = n_;
  j["scale"] = scale_;
  j["offset"] = offset_;
  j["axes"] = {axes_[0], axes_[1], axes_[2]};
  if (bump_.amplitude != 0.0)
    j["bump"] = {{"amplitude", bump_.amplitude}, {"width", bump_.width},
                 {"center", {bump_.uc, bump_.vc}}};
  return j;
}

ConformalHarmonicMap ConformalHarmonicMap::from_json(const nlohmann::json &j) {
  try {
    const auto &r = j.at("rect");
    ParamRect rect{r.at(0).at(0).get<double>(), r.at(0).at(1).get<double>(),
                   r.at(1).at(0).get<double>(), r.at(1).at(1).get<double>()};
    ConformalHarmonicMap f(map_tag_from_string(j.at("map").get<std::string>()), rect,
                           j.at("dim").get<std::size_t>());
    f.set_transform(j.at("scale").get<double>(), j.at("offset").get<Vec>());
    if (j.contains("axes")) {
      const auto &a = j.at("axes");
      f.set_axes({a.at(0).get<Vec>(), a.at(1).get<Vec>(), a.at(2).get<Vec>()});
    }
    if (j.contains("bump")) {
      const auto &b = j.at("bump");
      f.set_bump({b.at("amplitude").get<double>(), b.at("width").get<double>(),
                  b.at("center").at(0).get<double>(), b.at("center").at(1).get<double>()});
    }
    return f;
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("bad map record: ") + e.what());
  }
}

double MapResiduals::worst() const {
  return std::max({harmonic, conformal, orthogonal});
}

MapResiduals map_residuals(const ConformalHarmonicMap &f, std::size_t count,
                           std::uint64_t seed) {
  Rng rng(seed);
  const ParamRect &r = f.rect();
  std::uniform_real_distribution<double> U(r.u0, r.u1), W(r.v0, r.v1);
  MapResiduals res;
  for (std::size_t k = 0; k < count; ++k) {
    const double u = U(rng), v = W(rng);
    const MapJet j = f.jet(u, v);
    res.harmonic = std::max(res.harmonic, norm(add(j.fuu, j.fvv)));
    res.conformal = std::max(res.conformal, std::abs(dot(j.fu, j.fu) - dot(j.fv, j.fv)));
    res.orthogonal = std::max(res.orthogonal, std::abs(dot(j.fu, j.fv)));
  }
  return res;
}

void check_map_invariants(const ConformalHarmonicMap &f, std::size_t count,
                          std::uint64_t seed) {
  const MapResiduals r = map_residuals(f, count, seed);
  if (r.worst() > kTolMapInvariant) {
    std::ostringstream os;
    os << to_string(f.tag()) << " is not conformal harmonic: |f_uu + f_vv| = "
       << r.harmonic << ", ||f_u|^2 - |f_v|^2| = " << r.conformal
       << ", |f_u . f_v| = " << r.orthogonal;
    throw MapInvariantError(os.str());
  }
}

PullbackTerms pullback_terms(const ScalarField &rho, const ConformalHarmonicMap &f,
                             double u, double v) {
  if (rho.dim() != f.dim())
    throw DimensionError("field and map dimensions differ");
  const MapJet m = f.jet(u, v);
  const Jet j = rho.jet(m.f, 2);
  PullbackTerms t;
  t.chain = j.hessian.form(m.fu, m.fu) + j.hessian.form(m.fv, m.fv);
  t.conformal = dot(m.fu, m.fu) * trace_on_plane(j.hessian, orthonormalize({m.fu, m.fv}));
  t.full = t.chain + dot(j.gradient, add(m.fuu, m.fvv));
  return t;
}

double pullback_laplacian(const ScalarField &rho, const ConformalHarmonicMap &f,
                          double u, double v) {
  const PullbackTerms t = pullback_terms(rho, f, u, v);
  if (std::abs(t.chain - t.conformal) > 1e-8 * (1.0 + std::abs(t.chain))) {
    std::ostringstream os;
    os << "conformal-factor identity fails at (u, v) = (" << u << ", " << v
       << "): chain rule " << t.chain << " vs " << t.conformal;
    throw MapInvariantError(os.str());
  }
  return t.chain;
}

double stencil_laplacian(const ScalarField &rho, const ConformalHarmonicMap &f,
                         double u, double v, double h) {
  const double c = rho.value(f(u, v));
  const double s = rho.value(f(u + h, v)) + rho.value(f(u - h, v)) +
                   rho.value(f(u, v + h)) + rho.value(f(u, v - h));
  return (s - 4.0 * c) / (h * h);
}

std::array<double, 2> ParamGrid::at(const ParamRect &r, std::size_t k) const {
  const std::size_t i = k / nv, l = k % nv;
  const double su = nu > 1 ? static_cast<double>(i) / (nu - 1) : 0.5;
  const double sv = nv > 1 ? static_cast<double>(l) / (nv - 1) : 0.5;
  return {r.u0 + su * (r.u1 - r.u0), r.v0 + sv * (r.v1 - r.v0)};
}

namespace {

std::vector<double> image_values(const ScalarField &rho, const ConformalHarmonicMap &f,
                                 const ParamGrid &grid, Exec exec) {
  if (grid.size() == 0)
    throw ConfigError("empty parameter grid");
  if (rho.dim() != f.dim())
    throw DimensionError("field and map dimensions differ");
  auto vals = sweep(grid.size(), [&](std::size_t k) {
    const auto [u, v] = grid.at(f.rect(), k);
    return rho.value(f(u, v));
  }, exec);
  for (std::size_t k = 0; k < vals.size(); ++k)
    if (vals[k] > kTolBd) {
      const auto [u, v] = grid.at(f.rect(), k);
      std::ostringstream os;
      os.precision(17);
      os << "f(" << u << ", " << v << ") = " << point_string(f(u, v))
         << " has rho = " << vals[k];
      throw ImageOutsideDomain(os.str());
    }
  return vals;
}

Dichotomy classify(const std::vector<double> &vals) {
  const double mx = *std::max_element(vals.begin(), vals.end());
  if (mx < -kTolBd)
    return Dichotomy::interior;
  const bool all_bd = std::all_of(vals.begin(), vals.end(),
                                  [](double x) { return std::abs(x) <= kTolBd; });
  return all_bd ? Dichotomy::boundary : Dichotomy::mixed;
}

} // namespace

SubharmonicityReport subharmonicity_sweep(const ScalarField &rho,
                                          const ConformalHarmonicMap &f,
                                          const ParamGrid &grid, Exec exec) {
  SubharmonicityReport rep;
  rep.residuals = map_residuals(f, 1000, 1);
  check_map_invariants(f, 1000, 1);
  const std::vector<double> vals = image_values(rho, f, grid, exec);
  rep.rows = sweep(grid.size(), [&](std::size_t k) {
    const auto [u, v] = grid.at(f.rect(), k);
    HarmonicRow row;
    row.u = u;
    row.v = v;
    row.value = vals[k];
    row.laplacian = pullback_laplacian(rho, f, u, v);
    row.stencil = stencil_laplacian(rho, f, u, v);
    return row;
  }, exec);
  rep.min_laplacian = rep.rows[0].laplacian;
  rep.max_value = rep.rows[0].value;
  for (std::size_t k = 0; k < rep.rows.size(); ++k) {
    const HarmonicRow &r = rep.rows[k];
    if (r.laplacian < rep.min_laplacian) {
      rep.min_laplacian = r.laplacian;
      rep.argmin = k;
    }
    if (r.value > rep.max_value) {
      rep.max_value = r.value;
      rep.argmax = k;
    }
    rep.max_stencil_gap = std::max(
        rep.max_stencil_gap,
        std::abs(r.laplacian - r.stencil) / std::max(1.0, std::abs(r.laplacian)));
  }
  rep.dichotomy = classify(vals);
  return rep;
}

DichotomyResult dichotomy_flag(const ScalarField &rho, const ConformalHarmonicMap &f,
                               const ParamGrid &grid, Exec exec) {
  const std::vector<double> vals = image_values(rho, f, grid, exec);
  const auto it = std::max_element(vals.begin(), vals.end());
  DichotomyResult d;
  d.flag = classify(vals);
  d.max_value = *it;
  d.touch = grid.at(f.rect(), static_cast<std::size_t>(it - vals.begin()));
  d.touch_point = f(d.touch[0], d.touch[1]);
  return d;
}

nlohmann::json to_json(const MapResiduals &r) {
  return {{"harmonic", r.harmonic}, {"conformal", r.conformal},
          {"orthogonal", r.orthogonal}};
}

nlohmann::json to_json(const SubharmonicityReport &r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const HarmonicRow &x : r.rows)
    rows.push_back({{"u", x.u}, {"v", x.v}, {"rho", x.value},
                    {"laplacian", x.laplacian}, {"stencil", x.stencil}});
  const HarmonicRow &m = r.rows.at(r.argmin);
  return {{"samples", r.rows.size()},
          {"min_laplacian", r.min_laplacian},
          {"argmin", {m.u, m.v}},
          {"max_stencil_gap", r.max_stencil_gap},
          {"max_value", r.max_value},
          {"dichotomy", to_string(r.dichotomy)},
          {"residuals", to_json(r.residuals)},
          {"rows", rows}};
}

} // namespace pconvex
