#include "pconvex/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pconvex/error.hpp"

namespace pconvex {

Triple smoothstep(double u) {
  if (u <= 0.0)
    return {0.0, 0.0, 0.0};
  if (u >= 1.0)
    return {1.0, 0.0, 0.0};
  const double v = 1.0 - u;
  return {u * u * u * (10.0 - 15.0 * u + 6.0 * u * u), 30.0 * u * u * v * v,
          60.0 * u * v * (1.0 - 2.0 * u)};
}

ExpH::ExpH(double a) : a_(a) {
  if (!(a > 0.0) || !std::isfinite(a))
    throw ConstructionError("h needs a > 0, got " + std::to_string(a));
}

Triple ExpH::operator()(double t) const {
  const double e = std::exp(a_ * t);
  return {std::expm1(a_ * t) / a_, e, a_ * e};
}

double ExpH::inverse(double c) const {
  if (!(1.0 + a_ * c > 0.0))
    throw ConstructionError("h^-1(c) needs 1 + a c > 0");
  return std::log1p(a_ * c) / a_;
}

Phi::Phi(double c) : c_(c) {
  if (!(c < 0.0) || !std::isfinite(c))
    throw ConstructionError("phi needs c < 0, got " + std::to_string(c));
  const double tol = 1e-14 * std::abs(c);
  if (std::abs((*this)(c).f - 2.0 * c / 3.0) > tol ||
      std::abs((*this)(c / 2.0).f - c / 2.0) > tol || (*this)(0.0).f != 0.0)
    throw ConstructionError("phi misses its clamp values");
  const int n = 10000;
  const double lo = 2.0 * c, hi = 1.0;
  double prev = (*this)(lo).f;
  for (int k = 1; k <= n; ++k) {
    const double t = lo + (hi - lo) * k / n;
    const Triple v = (*this)(t);
    if (v.d2 < -1e-10 || v.d1 < 0.0 || v.d1 > 1.0 || v.f < prev)
      throw ConstructionError("phi fails the convexity check at t = " +
                              std::to_string(t));
    prev = v.f;
  }
}

Triple Phi::operator()(double t) const {
  const double start = 5.0 * c_ / 6.0;
  const double len = -c_ / 3.0;
  if (t <= start)
    return {2.0 * c_ / 3.0, 0.0, 0.0};
  if (t >= c_ / 2.0)
    return {t, 1.0, 0.0};
  const double u = (t - start) / len;
  const Triple s = smoothstep(u);
  // integral of S from 0 to u
  const double area = u * u * u * u * (2.5 - 3.0 * u + u * u);
  return {2.0 * c_ / 3.0 + len * area, s.f, s.d1 / len};
}

Triple chi_of_delta(double c, double delta) {
  const double w = -c / 6.0;
  const Triple s = smoothstep((c / 6.0 - delta) / w);
  return {s.f, -s.d1 / w, s.d2 / (w * w)};
}

void SynthesisParams::validate() const {
  if (!(c < 0.0) || !std::isfinite(c))
    throw ConfigError("synthesis needs c < 0");
  if (!(a > 0.0) || !std::isfinite(a))
    throw ConfigError("synthesis needs a > 0");
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw ConfigError("synthesis needs eps >= 0");
  if (!(1.0 + a * c > 0.0))
    throw ConfigError("synthesis needs 1 + a c > 0");
  if (p < 1)
    throw ConfigError("synthesis needs p >= 1");
}

namespace {

Vec foot_normal(const ImplicitDomain &dom, std::span<const double> y) {
  return project(dom, y).normal;
}

SymMatrix delta_hessian(const ImplicitDomain &dom, std::span<const double> x) {
  return fd_hessian_of_gradient(
      [&dom](std::span<const double> y) { return foot_normal(dom, y); }, x, 0.0, 4);
}

Parts compute_parts(const ImplicitDomain &dom, const SynthesisParams &prm,
                    const ExpH &h, const Phi &phi, std::span<const double> x,
                    int order) {
  const std::size_t n = x.size();
  const double psi = dot(x, x);
  Parts out;
  const auto deep = [&]() {
    out.deep = true;
    out.base = 2.0 * prm.c / 3.0;
    out.chi_psi = psi;
    if (order >= 1) {
      out.base_grad.assign(n, 0.0);
      out.chi_psi_grad = scaled(x, 2.0);
    }
    if (order >= 2) {
      out.base_hess = SymMatrix(n);
      out.chi_psi_hess = 2.0 * SymMatrix::identity(n);
    }
    return out;
  };

  // delta <= h^-1(c) puts h(delta) below c, where phi is constant and chi = 1
  const double deep_level = h.inverse(prm.c);
  const double r0 = dom.rho0().value(x);
  if (r0 < 0.0 && -r0 / dom.gradient_bound() >= -deep_level)
    return deep();

  Projection pr;
  try {
    pr = project(dom, x);
  } catch (const ProjectionError &) {
    // off the certified collar; inside D this is far below the c-level
    if (r0 < 0.0)
      return deep();
    throw;
  }
  if (pr.delta <= deep_level) {
    deep();
    out.delta = pr.delta;
    return out;
  }

  const double d = pr.delta;
  const Vec &nrm = pr.normal;
  const Triple hv = h(d);
  const Triple fv = phi(hv.f);
  const Triple cv = chi_of_delta(prm.c, d);
  out.delta = d;
  out.base = fv.f;
  out.chi_psi = cv.f * psi;
  if (order >= 1) {
    out.base_grad = scaled(nrm, fv.d1 * hv.d1);
    out.chi_psi_grad = axpy(scaled(x, 2.0 * cv.f), psi * cv.d1, nrm);
  }
  if (order >= 2) {
    SymMatrix hd(n);
    if (fv.d1 != 0.0 || cv.d1 != 0.0)
      hd = delta_hessian(dom, x);
    // Hess(h o delta), then the outer phi
    SymMatrix hr = hv.d1 * hd;
    hr += SymMatrix::outer(nrm, hv.d2);
    out.base_hess = fv.d1 * hr;
    out.base_hess += SymMatrix::outer(nrm, fv.d2 * hv.d1 * hv.d1);
    // Hess(chi |x|^2) = |x|^2 Hess chi + 2 (grad chi x^T + x grad chi^T) + 2 chi I
    SymMatrix hc = cv.d1 * hd;
    hc += SymMatrix::outer(nrm, cv.d2);
    out.chi_psi_hess = psi * hc;
    out.chi_psi_hess += SymMatrix::sym_outer(scaled(nrm, cv.d1), x, 2.0);
    out.chi_psi_hess += (2.0 * cv.f) * SymMatrix::identity(n);
  }
  return out;
}

} // namespace

DefiningFunction::DefiningFunction(ImplicitDomain dom, SynthesisParams params)
    : dom_(std::move(dom)), params_(std::move(params)) {
  params_.validate();
  const ExpH h(params_.a);
  const Phi phi(params_.c);
  const ImplicitDomain d = dom_;
  const SynthesisParams prm = params_;
  field_ = ScalarField(
      d.dim(),
      [d, prm, h, phi](std::span<const double> x, int order) {
        const Parts parts = compute_parts(d, prm, h, phi, x, order);
        Jet j;
        j.value = parts.base + prm.eps * parts.chi_psi;
        if (order >= 1)
          j.gradient = axpy(parts.base_grad, prm.eps, parts.chi_psi_grad);
        if (order >= 2)
          j.hessian = parts.base_hess + prm.eps * parts.chi_psi_hess;
        return j;
      },
      DerivativeMode::finite_difference);
}

Parts DefiningFunction::parts(std::span<const double> x, int order) const {
  return compute_parts(dom_, params_, ExpH(params_.a), Phi(params_.c), x, order);
}

double choose_a(const ImplicitDomain &dom, const std::vector<Vec> &boundary,
                double margin, std::size_t p) {
  if (p < 1 || p + 1 > dom.dim())
    throw InvalidP("choose_a needs 1 <= p <= n - 1");
  double worst = 0.0;
  for (const Vec &q : boundary) {
    const Vec nu = principal_curvatures(dom, q).curvatures;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < p; ++i)
      s += nu[i];
    worst = std::min(worst, s);
  }
  return -worst + margin;
}

double choose_a(const PConvexityReport &report, double margin) {
  double worst = 0.0;
  for (const auto &s : report.samples) {
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < report.p; ++i)
      sum += s.curvatures[i];
    worst = std::min(worst, sum);
  }
  return -worst + margin;
}

double probe_collar_depth(const ImplicitDomain &dom,
                          const std::vector<Vec> &boundary) {
  const double reach = 0.5 * dom.bbox().min_extent();
  std::vector<Vec> normals;
  for (const Vec &q : boundary)
    normals.push_back(outward_normal(dom, q));
  double best = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double d = reach * k / 100.0;
    const auto ok = sweep(boundary.size(), [&](std::size_t i) -> char {
      try {
        const Projection pr = project(dom, axpy(boundary[i], -d, normals[i]));
        return norm(sub(pr.foot, boundary[i])) <= 1e-6 &&
               std::abs(pr.delta + d) <= 1e-8 * (1.0 + d);
      } catch (const Error &) {
        return 0;
      }
    });
    if (std::find(ok.begin(), ok.end(), 0) != ok.end())
      break;
    best = d;
  }
  return best;
}

SymMatrix composite_hessian(const ExpH &h, const Jet &delta) {
  const Triple v = h(delta.value);
  SymMatrix out = v.d1 * delta.hessian;
  out += SymMatrix::outer(delta.gradient, v.d2);
  return out;
}

SymMatrix composite_hessian(const ExpH &h, const ScalarField &delta,
                            std::span<const double> x) {
  return composite_hessian(h, delta.jet(x, 2));
}

ScalarField chi_field(const ImplicitDomain &dom, double c) {
  if (!(c < 0.0))
    throw ConstructionError("chi needs c < 0");
  return ScalarField(
      dom.dim(),
      [dom, c](std::span<const double> x, int order) {
        Jet j;
        const std::size_t n = x.size();
        Projection pr;
        try {
          pr = project(dom, x);
        } catch (const ProjectionError &) {
          if (!(dom.rho0().value(x) < 0.0))
            throw;
          j.value = 1.0;
          if (order >= 1)
            j.gradient.assign(n, 0.0);
          if (order >= 2)
            j.hessian = SymMatrix(n);
          return j;
        }
        const Triple cv = chi_of_delta(c, pr.delta);
        j.value = cv.f;
        if (order >= 1)
          j.gradient = scaled(pr.normal, cv.d1);
        if (order >= 2) {
          j.hessian = SymMatrix(n);
          if (cv.d1 != 0.0)
            j.hessian = cv.d1 * delta_hessian(dom, x);
          j.hessian += SymMatrix::outer(pr.normal, cv.d2);
        }
        return j;
      },
      DerivativeMode::finite_difference);
}

Grid make_grid(const ImplicitDomain &dom, double c, const GridSpec &spec) {
  Grid g;
  Rng rng(derive_seed(spec.seed, 0));
  const std::size_t budget = 1000 * std::max<std::size_t>(spec.interior, 1);
  for (std::size_t attempt = 0; g.interior.size() < spec.interior; ++attempt) {
    if (attempt >= budget)
      throw SamplingError("interior rejection sampling ran out of budget");
    Vec x;
    for (const auto &[lo, hi] : dom.bbox().ranges)
      x.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
    try {
      if (dom.rho0().value(x) < 0.0)
        g.interior.push_back(std::move(x));
    } catch (const EvaluationError &) {
    }
  }
  g.boundary = sample_boundary(dom, spec.boundary, derive_seed(spec.seed, 1));
  const std::vector<Vec> feet =
      sample_boundary(dom, spec.collar, derive_seed(spec.seed, 2));
  Rng depth_rng(derive_seed(spec.seed, 3));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const Vec &q : feet) {
    const double t = -c * (1.0 - u(depth_rng)); // (0, |c|]
    g.collar.push_back(axpy(q, -t, outward_normal(dom, q)));
  }
  return g;
}

EpsilonChoice choose_epsilon(const DefiningFunction &base, std::size_t p,
                             const Grid &grid, Exec exec) {
  struct Cached {
    double base = 0.0, chi_psi = 0.0;
    SymMatrix a, b;
  };
  std::vector<Vec> pts = grid.interior;
  pts.insert(pts.end(), grid.collar.begin(), grid.collar.end());
  pts.insert(pts.end(), grid.boundary.begin(), grid.boundary.end());
  const std::size_t n_int = grid.interior.size();
  const std::size_t n_col = grid.collar.size();
  const auto cache = sweep(
      pts.size(),
      [&](std::size_t i) {
        const Parts pr = base.parts(pts[i], 2);
        return Cached{pr.base, pr.chi_psi, pr.base_hess, pr.chi_psi_hess};
      },
      exec);

  EpsilonChoice out;
  for (int k = 0; k <= 40; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const auto traces = sweep(
        pts.size(),
        [&](std::size_t i) { return min_trace_p(cache[i].a + eps * cache[i].b, p); },
        exec);
    double int_min = std::numeric_limits<double>::infinity();
    double bc_min = std::numeric_limits<double>::infinity();
    double max_val = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i < n_int)
        int_min = std::min(int_min, traces[i]);
      else
        bc_min = std::min(bc_min, traces[i]);
      if (i < n_int + n_col)
        max_val = std::max(max_val, cache[i].base + eps * cache[i].chi_psi);
    }
    if (int_min > 0.0 && bc_min >= -kTolCert && max_val < 0.0) {
      out.eps = eps;
      out.k = k;
      out.interior_min = int_min;
      out.boundary_collar_min = bc_min;
      return out;
    }
  }
  out.warning = true;
  return out;
}

Certificate verify(const DefiningFunction &df, std::size_t p, const Grid &grid,
                   Exec exec) {
  const std::size_t n = df.domain().dim();
  if (p < 1 || p > n)
    throw InvalidP("verify needs 1 <= p <= n");
  struct Eval {
    double value = 0.0, trace = 0.0, grad = 0.0;
  };
  std::vector<Vec> pts = grid.interior;
  pts.insert(pts.end(), grid.collar.begin(), grid.collar.end());
  pts.insert(pts.end(), grid.boundary.begin(), grid.boundary.end());
  const std::size_t n_int = grid.interior.size();
  const std::size_t n_col = grid.collar.size();
  const auto evals = sweep(
      pts.size(),
      [&](std::size_t i) {
        const Jet j = df.field().jet(pts[i], 2);
        return Eval{j.value, min_trace_p(j.hessian, p), norm(j.gradient)};
      },
      exec);

  Certificate cert;
  cert.p = p;
  cert.n_interior = n_int;
  cert.n_collar = n_col;
  cert.n_boundary = grid.boundary.size();
  const double inf = std::numeric_limits<double>::infinity();
  cert.dbar_min = cert.interior_min = cert.collar_min = cert.boundary_min = inf;
  cert.max_interior_value = -inf;
  cert.min_boundary_grad = inf;
  std::size_t dbar_arg = 0, int_arg = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Eval &e = evals[i];
    if (e.trace < cert.dbar_min) {
      cert.dbar_min = e.trace;
      dbar_arg = i;
    }
    if (i < n_int) {
      if (e.trace < cert.interior_min) {
        cert.interior_min = e.trace;
        int_arg = i;
      }
    } else if (i < n_int + n_col) {
      cert.collar_min = std::min(cert.collar_min, e.trace);
    } else {
      cert.boundary_min = std::min(cert.boundary_min, e.trace);
      cert.max_boundary_abs = std::max(cert.max_boundary_abs, std::abs(e.value));
      cert.min_boundary_grad = std::min(cert.min_boundary_grad, e.grad);
    }
    if (i < n_int + n_col)
      cert.max_interior_value = std::max(cert.max_interior_value, e.value);
  }
  if (!pts.empty())
    cert.dbar_argmin = pts[dbar_arg];
  if (n_int > 0)
    cert.interior_argmin = pts[int_arg];

  if (!pts.empty()) {
    const SymMatrix hess = df.field().hessian(cert.dbar_argmin);
    const Spectrum s = eigh(hess);
    const double formula = min_trace_p(s, p);
    cert.spot_eigen_gap = std::abs(trace_on_plane(hess, eigen_frame(s, p)) - formula);
    cert.spot_min_trace = p < n ? inf : hess.trace();
    if (p < n) {
      cert.spot_frames = 1000;
      Rng rng(derive_seed(df.params().grid.seed, 7));
      for (std::size_t k = 0; k < cert.spot_frames; ++k)
        cert.spot_min_trace =
            std::min(cert.spot_min_trace, trace_on_plane(hess, random_frame(n, p, rng)));
    }
    cert.spot_ok = cert.spot_min_trace >= formula - 1e-8 && cert.spot_eigen_gap <= 1e-8;
  }
  cert.strong_expected = df.no_p_flat;
  cert.passed = cert.dbar_min >= -kTolCert &&
                (!cert.strong_expected || n_int == 0 || cert.interior_min > 0.0);
  return cert;
}

DefiningFunction synthesize(const ImplicitDomain &dom, std::size_t p,
                            const SynthesisOptions &opts) {
  const std::vector<Vec> bd = sample_boundary(
      dom, std::max(opts.certify_samples, opts.probe_samples),
      derive_seed(opts.grid.seed, 100));
  CertifyOptions copts;
  copts.exec = opts.exec;
  PConvexityReport rep = certify_boundary(dom, p, bd, copts);
  const bool convex = rep.verdict == Verdict::strongly_p_convex ||
                      rep.verdict == Verdict::p_convex;
  if (opts.require_p_convex && !convex) {
    const Vec &w = rep.samples[rep.argmin].point;
    std::string where;
    for (double v : w)
      where += (where.empty() ? "" : ", ") + std::to_string(v);
    throw NotPConvex("boundary is " + to_string(rep.verdict) + " for p = " +
                     std::to_string(p) + ", min s_p = " + std::to_string(rep.min_sp) +
                     " at (" + where + ")");
  }

  SynthesisParams prm;
  prm.p = p;
  prm.margin_a = opts.margin_a;
  prm.grid = opts.grid;
  prm.a = choose_a(rep, opts.margin_a);
  const std::vector<Vec> probes(bd.begin(),
                                bd.begin() + static_cast<long>(std::min(opts.probe_samples, bd.size())));
  prm.collar_depth = probe_collar_depth(dom, probes);
  if (!(prm.collar_depth > 0.0))
    throw ProjectionError("no collar depth could be certified along inner normals");
  prm.c = -0.25 * prm.collar_depth;
  // keep 1 + a c >= 1/2 so h^-1(c) stays well conditioned
  if (1.0 + prm.a * prm.c < 0.5)
    prm.c = -0.5 / prm.a;

  const Grid grid = make_grid(dom, prm.c, opts.grid);
  DefiningFunction base(dom, prm);
  const EpsilonChoice eps = choose_epsilon(base, p, grid, opts.exec);
  prm.eps = eps.eps;

  DefiningFunction df(dom, prm);
  df.no_p_flat = rep.p_flat_points.empty();
  df.boundary_report = std::move(rep);
  df.epsilon = eps;
  df.certificate = verify(df, p, grid, opts.exec);
  return df;
}

LevelSetReport level_set_family_check(const ImplicitDomain &dom, std::size_t p,
                                      const std::vector<double> &t_values,
                                      const std::vector<Vec> &boundary,
                                      Exec exec) {
  if (p < 1 || p + 1 > dom.dim())
    throw InvalidP("level-set check needs 1 <= p <= n - 1");
  LevelSetReport rep;
  rep.p = p;
  for (double t : t_values) {
    struct Sp {
      double s = 0.0;
      Vec x;
    };
    const auto vals = sweep(
        boundary.size(),
        [&](std::size_t i) {
          Vec nu;
          Vec x = boundary[i];
          if (t == 0.0) {
            nu = principal_curvatures(dom, x).curvatures;
          } else {
            x = axpy(boundary[i], t, outward_normal(dom, boundary[i]));
            nu = level_set_curvatures(dom, x);
          }
          double s = 0.0;
          for (std::size_t k = 0; k < p; ++k)
            s += nu[k];
          return Sp{s, x};
        },
        exec);
    LevelSetRow row;
    row.t = t;
    row.samples = vals.size();
    row.min_sp = std::numeric_limits<double>::infinity();
    for (const Sp &v : vals)
      if (v.s < row.min_sp) {
        row.min_sp = v.s;
        row.argmin = v.x;
      }
    rep.rows.push_back(std::move(row));
  }
  std::vector<const LevelSetRow *> by_t;
  for (const auto &r : rep.rows)
    by_t.push_back(&r);
  std::stable_sort(by_t.begin(), by_t.end(),
                   [](const LevelSetRow *a, const LevelSetRow *b) { return a->t > b->t; });
  for (std::size_t i = 1; i < by_t.size(); ++i)
    if (by_t[i]->min_sp < by_t[i - 1]->min_sp - 1e-6)
      rep.monotone = false;
  return rep;
}

nlohmann::json to_json(const SynthesisParams &prm) {
  return {{"p", prm.p},
          {"a", prm.a},
          {"c", prm.c},
          {"eps", prm.eps},
          {"margin_a", prm.margin_a},
          {"collar_depth", prm.collar_depth},
          {"chi_transition", {prm.chi_transition().first, prm.chi_transition().second}},
          {"phi_transition", {prm.phi_transition().first, prm.phi_transition().second}},
          {"grid",
           {{"interior", prm.grid.interior},
            {"collar", prm.grid.collar},
            {"boundary", prm.grid.boundary},
            {"seed", prm.grid.seed}}}};
}

SynthesisParams params_from_json(const nlohmann::json &j) {
  SynthesisParams prm;
  try {
    prm.p = j.at("p").get<std::size_t>();
    prm.a = j.at("a").get<double>();
    prm.c = j.at("c").get<double>();
    prm.eps = j.at("eps").get<double>();
    prm.margin_a = j.value("margin_a", 0.1);
    prm.collar_depth = j.value("collar_depth", 0.0);
    if (j.contains("grid")) {
      const auto &g = j.at("grid");
      prm.grid.interior = g.value("interior", prm.grid.interior);
      prm.grid.collar = g.value("collar", prm.grid.collar);
      prm.grid.boundary = g.value("boundary", prm.grid.boundary);
      prm.grid.seed = g.value("seed", prm.grid.seed);
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("malformed synthesis parameters: ") + e.what());
  }
  prm.validate();
  return prm;
}

nlohmann::json to_json(const Certificate &c) {
  return {{"p", c.p},
          {"samples", {{"interior", c.n_interior}, {"collar", c.n_collar}, {"boundary", c.n_boundary}}},
          {"dbar_min", c.dbar_min},
          {"dbar_argmin", c.dbar_argmin},
          {"interior_min", c.interior_min},
          {"interior_argmin", c.interior_argmin},
          {"collar_min", c.collar_min},
          {"boundary_min", c.boundary_min},
          {"max_interior_value", c.max_interior_value},
          {"max_boundary_abs", c.max_boundary_abs},
          {"min_boundary_grad", c.min_boundary_grad},
          {"spot_check",
           {{"frames", c.spot_frames},
            {"min_frame_trace", c.spot_min_trace},
            {"eigenframe_gap", c.spot_eigen_gap},
            {"ok", c.spot_ok}}},
          {"strong_expected", c.strong_expected},
          {"passed", c.passed}};
}

nlohmann::json to_json(const EpsilonChoice &e) {
  return {{"eps", e.eps},
          {"k", e.k},
          {"warning", e.warning},
          {"interior_min", e.interior_min},
          {"boundary_collar_min", e.boundary_collar_min}};
}

nlohmann::json DefiningFunction::to_json() const {
  nlohmann::json j;
  j["kind"] = "defining_function";
  j["domain"] = pconvex::to_json(dom_.spec());
  j["params"] = pconvex::to_json(params_);
  j["no_p_flat"] = no_p_flat;
  if (epsilon)
    j["epsilon"] = pconvex::to_json(*epsilon);
  if (certificate)
    j["certificate"] = pconvex::to_json(*certificate);
  return j;
}

DefiningFunction DefiningFunction::from_json(const nlohmann::json &j) {
  if (!j.is_object() || !j.contains("domain") || !j.contains("params"))
    throw ConfigError("defining function record needs 'domain' and 'params'");
  DefiningFunction df(make_domain(domain_spec_from_json(j.at("domain"))),
                      params_from_json(j.at("params")));
  df.no_p_flat = j.value("no_p_flat", false);
  return df;
}

} // namespace pconvex
