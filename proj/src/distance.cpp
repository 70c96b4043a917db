#include "pconvex/distance.hpp"

#include <algorithm>
#include <cmath>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

struct Lagrange {
  Vec q;
  double lambda = 0.0;
  Jet jet; // rho0 at q, order 2
};

double merit(std::span<const double> x, const Lagrange &s) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = s.q[i] - x[i] + s.lambda * s.jet.gradient[i];
    m += r * r;
  }
  const double gn = norm(s.jet.gradient);
  const double c = s.jet.value / gn;
  return m + c * c;
}

Lagrange make_state(const ScalarField &f, std::span<const double> x, Vec q) {
  Lagrange s;
  s.jet = f.jet(q, 2);
  const double gg = dot(s.jet.gradient, s.jet.gradient);
  if (!(gg > 0.0))
    throw ProjectionError("gradient vanishes at an iterate");
  s.lambda = dot(sub(x, q), s.jet.gradient) / gg;
  s.q = std::move(q);
  return s;
}

// Newton on F(q, l) = (q - x + l grad rho0(q), rho0(q)).
std::optional<Lagrange> newton(const ScalarField &f,
                               std::span<const double> x, Lagrange s,
                               int &iterations) {
  const std::size_t n = x.size();
  const double scale = 1.0 + norm(x);
  double m = merit(x, s);
  for (int it = 0; it < kProjectionMaxIter; ++it) {
    ++iterations;
    const Vec &g = s.jet.gradient;
    std::vector<double> jac((n + 1) * (n + 1), 0.0);
    Vec rhs(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j)
        jac[i * (n + 1) + j] = (i == j ? 1.0 : 0.0) + s.lambda * s.jet.hessian(i, j);
      jac[i * (n + 1) + n] = g[i];
      jac[n * (n + 1) + i] = g[i];
      rhs[i] = -(s.q[i] - x[i] + s.lambda * g[i]);
    }
    rhs[n] = -s.jet.value;
    Vec step;
    try {
      step = solve_dense(jac, rhs, n + 1);
    } catch (const InvalidMatrix &) {
      return std::nullopt;
    }
    double alpha = 1.0;
    Lagrange trial;
    double mt = 0.0;
    for (int k = 0; k < 30; ++k) {
      trial.q = s.q;
      for (std::size_t i = 0; i < n; ++i)
        trial.q[i] += alpha * step[i];
      trial.lambda = s.lambda + alpha * step[n];
      try {
        trial.jet = f.jet(trial.q, 2);
        if (dot(trial.jet.gradient, trial.jet.gradient) > 0.0) {
          mt = merit(x, trial);
          if (mt < m || mt <= 1e-30 * scale * scale)
            break;
        }
      } catch (const EvaluationError &) {
      }
      alpha *= 0.5;
    }
    double dq = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      dq = std::max(dq, std::abs(alpha * step[i]));
    const bool progressed = mt < m;
    if (progressed || mt <= 1e-30 * scale * scale) {
      s = std::move(trial);
      m = mt;
    }
    if (dq <= 1e-15 * scale || !progressed) {
      const double resid = std::abs(s.jet.value) / norm(s.jet.gradient);
      if (resid <= 1e-13 * scale && std::sqrt(m) <= 1e-10 * scale)
        return s;
      if (!progressed)
        return std::nullopt;
    }
  }
  return std::nullopt;
}

// Newton along the gradient onto {rho0 = 0}.
Vec retract(const ScalarField &f, Vec q) {
  for (int k = 0; k < 50; ++k) {
    const Jet j = f.jet(q, 1);
    const double gg = dot(j.gradient, j.gradient);
    if (!(gg > 0.0))
      throw ProjectionError("gradient vanishes during retraction");
    const double c = j.value / gg;
    for (std::size_t i = 0; i < q.size(); ++i)
      q[i] -= c * j.gradient[i];
    if (std::abs(c) * std::sqrt(gg) <= 1e-15 * (1.0 + norm(q)))
      break;
  }
  return q;
}

// Projected gradient descent of |x - q|^2 over the level set.
Vec descend(const ScalarField &f, std::span<const double> x, Vec q) {
  const double scale = 1.0 + norm(x);
  double dist = norm(sub(x, q));
  for (int k = 0; k < 2000; ++k) {
    const Vec g = f.gradient(q);
    const Vec nrm = scaled(g, 1.0 / norm(g));
    const Vec r = sub(x, q);
    const Vec rt = axpy(r, -dot(r, nrm), nrm);
    if (norm(rt) <= 1e-12 * scale)
      break;
    double step = 1.0;
    bool moved = false;
    for (int h = 0; h < 40; ++h) {
      Vec cand;
      try {
        cand = retract(f, axpy(q, step, rt));
      } catch (const Error &) {
        step *= 0.5;
        continue;
      }
      const double d = norm(sub(x, cand));
      if (d < dist) {
        q = std::move(cand);
        dist = d;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved)
      break;
  }
  return q;
}

bool is_local_minimum(const ImplicitDomain &dom, const Vec &foot,
                      double delta) {
  const BoundaryPoint bp = principal_curvatures(dom, foot);
  for (double nu : bp.curvatures)
    if (!(1.0 + delta * nu > 0.0))
      return false;
  return true;
}

bool parallel_to_normal(std::span<const double> x, const Vec &foot,
                        const Vec &normal) {
  const Vec r = sub(x, foot);
  const double len = norm(r);
  if (len <= 1e-12 * (1.0 + norm(x)))
    return true;
  const Vec perp = axpy(r, -dot(r, normal), normal);
  return norm(perp) <= 1e-6 * len;
}

std::optional<Projection> finish(const ImplicitDomain &dom,
                                 std::span<const double> x, const Lagrange &s,
                                 double side, int iterations, bool fallback) {
  if (std::abs(s.jet.value) > 1e-10)
    return std::nullopt;
  Projection p;
  p.foot = s.q;
  p.normal = scaled(s.jet.gradient, 1.0 / norm(s.jet.gradient));
  const Vec r = sub(x, p.foot);
  const double dist = norm(r);
  p.iterations = iterations;
  p.fallback = fallback;
  if (dist <= 1e-12 * (1.0 + norm(x))) {
    // rounding decides the side at this range
    p.delta = dot(r, p.normal);
  } else {
    p.delta = side * dist;
    if (!parallel_to_normal(x, p.foot, p.normal))
      return std::nullopt;
    // foot must be on the side of the normal that x is on
    if (dot(r, p.normal) * side < 0.0)
      return std::nullopt;
  }
  if (!is_local_minimum(dom, p.foot, p.delta))
    return std::nullopt;
  return p;
}

} // namespace

Projection project(const ImplicitDomain &dom, std::span<const double> x) {
  const ScalarField &f = dom.rho0();
  const Jet j0 = f.jet(x, 1);
  const double gg = dot(j0.gradient, j0.gradient);
  const double side = j0.value < 0.0 ? -1.0 : 1.0;
  if (j0.value == 0.0 && gg > 0.0) {
    Projection p;
    p.foot.assign(x.begin(), x.end());
    p.normal = scaled(j0.gradient, 1.0 / std::sqrt(gg));
    if (std::sqrt(gg) < kMinGradient)
      throw DegenerateGradient("at a boundary point");
    return p;
  }
  if (!(gg > 0.0))
    throw ProjectionError("gradient of rho0 vanishes at the query point");

  int iterations = 0;
  const Vec start = axpy(x, -j0.value / gg, j0.gradient);
  try {
    if (auto s = newton(f, x, make_state(f, x, start), iterations))
      if (auto p = finish(dom, x, *s, side, iterations, false))
        return *p;
  } catch (const EvaluationError &) {
  } catch (const ProjectionError &) {
  }

  // Fallback: descend along the surface from the retracted query point, then
  // polish with Newton.
  try {
    Vec q = descend(f, x, retract(f, Vec(x.begin(), x.end())));
    if (auto s = newton(f, x, make_state(f, x, q), iterations))
      if (auto p = finish(dom, x, *s, side, iterations, true))
        return *p;
  } catch (const EvaluationError &) {
  } catch (const ProjectionError &) {
  }
  throw ProjectionError("no certified nearest point (outside the collar?)");
}

Vec project_to_boundary(const ImplicitDomain &dom, std::span<const double> x) {
  return project(dom, x).foot;
}

double signed_distance(const ImplicitDomain &dom, std::span<const double> x) {
  return project(dom, x).delta;
}

bool in_collar(const ImplicitDomain &dom, std::span<const double> x) {
  try {
    project(dom, x);
    return true;
  } catch (const Error &) {
    return false;
  }
}

Vec outward_normal(const ImplicitDomain &dom, std::span<const double> q) {
  const Vec g = dom.rho0().gradient(q);
  const double gn = norm(g);
  if (gn < kMinGradient)
    throw DegenerateGradient("|grad rho0| = " + std::to_string(gn));
  return scaled(g, 1.0 / gn);
}

SymMatrix shape_operator(const ImplicitDomain &dom, std::span<const double> q) {
  const Jet j = dom.rho0().jet(q, 2);
  const double gn = norm(j.gradient);
  if (gn < kMinGradient)
    throw DegenerateGradient("|grad rho0| = " + std::to_string(gn));
  const std::size_t n = q.size();
  const Vec nrm = scaled(j.gradient, 1.0 / gn);
  // P H P with P = I - n n^T
  const Vec hn = j.hessian.apply(nrm);
  const double nhn = dot(nrm, hn);
  SymMatrix s = j.hessian;
  s += SymMatrix::sym_outer(nrm, hn, -1.0);
  s += SymMatrix::outer(nrm, nhn);
  s *= 1.0 / gn;
  (void)n;
  return s;
}

Frame BoundaryPoint::tangent_frame() const {
  return Frame(point.size(), directions, 1e-10);
}

BoundaryPoint principal_curvatures(const ImplicitDomain &dom,
                                   std::span<const double> q) {
  const Jet j = dom.rho0().jet(q, 2);
  const double gn = norm(j.gradient);
  if (gn < kMinGradient)
    throw DegenerateGradient("|grad rho0| = " + std::to_string(gn) + " below " +
                             std::to_string(kMinGradient));
  const std::size_t n = q.size();
  const Vec nrm = scaled(j.gradient, 1.0 / gn);
  const Frame tangent = orthogonal_complement(n, {nrm});
  SymMatrix m = restrict_to(j.hessian, tangent);
  m *= 1.0 / gn;
  const Spectrum sp = eigh(m);

  BoundaryPoint bp;
  bp.point.assign(q.begin(), q.end());
  bp.inner_normal = scaled(nrm, -1.0);
  bp.curvatures = sp.eigenvalues;
  for (const auto &coeffs : sp.eigenvectors) {
    Vec d(n, 0.0);
    for (std::size_t k = 0; k < coeffs.size(); ++k)
      d = axpy(d, coeffs[k], tangent[k]);
    bp.directions.push_back(std::move(d));
  }
  return bp;
}

ScalarField delta_field(const ImplicitDomain &dom) {
  return ScalarField(
      dom.dim(),
      [dom](std::span<const double> x, int order) {
        const Projection p = project(dom, x);
        Jet j;
        j.value = p.delta;
        if (order >= 1)
          j.gradient = p.normal;
        if (order >= 2)
          j.hessian = fd_hessian_of_gradient(
              [&dom](std::span<const double> y) { return project(dom, y).normal; },
              x, 0.0, 4);
        return j;
      },
      DerivativeMode::finite_difference);
}

ScalarField ball_distance_field(double radius, std::size_t n) {
  return ScalarField(n, [radius](std::span<const double> x, int order) {
    const double r = norm(x);
    if (r == 0.0)
      throw EvaluationError("distance to a sphere is not smooth at its center");
    Jet j;
    j.value = r - radius;
    if (order >= 1)
      j.gradient = scaled(x, 1.0 / r);
    if (order >= 2) {
      j.hessian = (1.0 / r) * SymMatrix::identity(x.size());
      j.hessian += SymMatrix::outer(x, -1.0 / (r * r * r));
    }
    return j;
  });
}

TransportReport curvature_transport_check(const ImplicitDomain &dom,
                                          std::span<const double> q,
                                          const std::vector<double> &t_values,
                                          const std::optional<ScalarField> &delta) {
  const BoundaryPoint bp = principal_curvatures(dom, q);
  const ScalarField field = delta ? *delta : delta_field(dom);
  const Frame tangent = bp.tangent_frame();
  const Vec outward = scaled(bp.inner_normal, -1.0);

  TransportReport rep;
  rep.point = bp.point;
  rep.curvatures = bp.curvatures;
  for (double t : t_values) {
    TransportRow row;
    row.t = t;
    for (double nu : bp.curvatures)
      row.predicted.push_back(nu / (1.0 + t * nu));
    std::sort(row.predicted.begin(), row.predicted.end());
    const Vec x = axpy(bp.point, t, outward);
    const SymMatrix h = field.hessian(x);
    row.measured = eigh(restrict_to(h, tangent)).eigenvalues;
    row.normal_eigenvalue = h.form(outward, outward);
    for (std::size_t i = 0; i < row.predicted.size(); ++i) {
      const double err = std::abs(row.measured[i] - row.predicted[i]) /
                         std::max(std::abs(row.predicted[i]), 1e-6);
      row.max_rel_error = std::max(row.max_rel_error, err);
    }
    rep.max_rel_error = std::max(rep.max_rel_error, row.max_rel_error);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

Vec level_set_curvatures(const ImplicitDomain &dom, std::span<const double> x) {
  const Projection p = project(dom, x);
  const SymMatrix h = fd_hessian_of_gradient(
      [&dom](std::span<const double> y) { return project(dom, y).normal; }, x, 0.0, 4);
  const Frame tangent = orthogonal_complement(x.size(), {p.normal});
  return eigh(restrict_to(h, tangent)).eigenvalues;
}

} // namespace pconvex
