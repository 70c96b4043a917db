#include "pconvex/pconvexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

Vec random_in_box(const Box &b, Rng &rng) {
  Vec x;
  x.reserve(b.dim());
  for (const auto &[lo, hi] : b.ranges)
    x.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
  return x;
}

std::string format_point(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i)
      s += ", ";
    s += std::to_string(x[i]);
  }
  return s + ")";
}

double partial_sum(const Vec &nu, std::size_t p) {
  return std::accumulate(nu.begin(), nu.begin() + static_cast<long>(p), 0.0);
}

CurvatureSample evaluate(const ImplicitDomain &dom, std::size_t p,
                         std::span<const double> q) {
  try {
    const BoundaryPoint bp = principal_curvatures(dom, q);
    return {bp.point, bp.curvatures, partial_sum(bp.curvatures, p), false};
  } catch (const DegenerateGradient &e) {
    throw DegenerateGradient(std::string(e.what()) + " at " + format_point(q));
  }
}

// Pattern search for a local minimum of s_p on bD: steps along the principal
// directions, re-projected onto bD, halving the step on failure.
CurvatureSample refine_minimum(const ImplicitDomain &dom, std::size_t p,
                               CurvatureSample best) {
  double h = 0.05 * dom.bbox().min_extent();
  for (int it = 0; it < 2000 && h > 1e-9; ++it) {
    const BoundaryPoint bp = principal_curvatures(dom, best.point);
    bool improved = false;
    for (const Vec &d : bp.directions) {
      for (double sgn : {1.0, -1.0}) {
        try {
          const Vec cand = project_to_boundary(dom, axpy(best.point, sgn * h, d));
          const CurvatureSample s = evaluate(dom, p, cand);
          if (s.s_p < best.s_p) {
            best = s;
            improved = true;
            break;
          }
        } catch (const Error &) {
        }
      }
      if (improved)
        break;
    }
    if (!improved)
      h *= 0.5;
  }
  best.refined = true;
  return best;
}

} // namespace

std::string to_string(Verdict v) {
  switch (v) {
  case Verdict::strongly_p_convex:
    return "strongly-p-convex";
  case Verdict::p_convex:
    return "p-convex";
  case Verdict::not_p_convex:
    return "not-p-convex";
  case Verdict::inconclusive:
    return "inconclusive";
  }
  return "inconclusive";
}

std::vector<Vec> sample_boundary(const ImplicitDomain &dom, std::size_t count,
                                 std::uint64_t seed) {
  Rng rng(seed);
  const ScalarField &f = dom.rho0();
  std::vector<Vec> out;
  out.reserve(count);
  const std::size_t budget = 1000 * std::max<std::size_t>(count, 1);
  for (std::size_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt >= budget)
      throw SamplingError("found " + std::to_string(out.size()) + " of " +
                          std::to_string(count) + " boundary points after " +
                          std::to_string(budget) + " attempts");
    Vec a = random_in_box(dom.bbox(), rng);
    Vec b = random_in_box(dom.bbox(), rng);
    try {
      double fa = f.value(a);
      const double fb = f.value(b);
      if (!((fa < 0.0) != (fb < 0.0)))
        continue;
      for (int k = 0; k < 200 && norm(sub(a, b)) > 1e-13; ++k) {
        const Vec m = axpy(scaled(a, 0.5), 0.5, b);
        const double fm = f.value(m);
        if ((fm < 0.0) == (fa < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      const Vec q = project_to_boundary(dom, a);
      const Jet j = f.jet(q, 1);
      if (std::abs(j.value) / norm(j.gradient) > kBoundaryTol)
        continue;
      out.push_back(q);
    } catch (const Error &) {
    }
  }
  return out;
}

PConvexityReport certify_boundary(const ImplicitDomain &dom, std::size_t p,
                                  const std::vector<Vec> &samples,
                                  const CertifyOptions &opts) {
  const std::size_t n = dom.dim();
  if (p < 1 || p + 1 > n)
    throw InvalidP("boundary certification needs 1 <= p <= n - 1, got p = " +
                   std::to_string(p) + " for n = " + std::to_string(n));
  if (samples.empty())
    throw SamplingError("no boundary samples to certify");

  PConvexityReport rep;
  rep.p = p;
  rep.samples = sweep(
      samples.size(),
      [&](std::size_t i) { return evaluate(dom, p, samples[i]); }, opts.exec);

  if (opts.refine) {
    std::vector<std::size_t> order(rep.samples.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rep.samples[a].s_p < rep.samples[b].s_p;
    });
    const std::size_t starts = std::min(opts.refine_starts, order.size());
    auto refined = sweep(
        starts,
        [&](std::size_t k) { return refine_minimum(dom, p, rep.samples[order[k]]); },
        opts.exec);
    for (auto &s : refined)
      rep.samples.push_back(std::move(s));
  }

  rep.min_sp = rep.samples[0].s_p;
  rep.argmin = 0;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    const CurvatureSample &s = rep.samples[i];
    if (s.s_p < rep.min_sp) {
      rep.min_sp = s.s_p;
      rep.argmin = i;
    }
    double flat = 0.0;
    for (std::size_t k = 0; k < p; ++k)
      flat = std::max(flat, std::abs(s.curvatures[k]));
    if (flat <= kTolFlat)
      rep.p_flat_points.push_back(s.point);
  }

  if (rep.min_sp > kTolStrict && rep.p_flat_points.empty())
    rep.verdict = Verdict::strongly_p_convex;
  else if (rep.min_sp >= -kTolCert)
    rep.verdict = Verdict::p_convex;
  else if (rep.min_sp < -10.0 * kTolCert)
    rep.verdict = Verdict::not_p_convex;
  else
    rep.verdict = Verdict::inconclusive;
  return rep;
}

double is_p_psh_at(const ScalarField &f, std::span<const double> x,
                   std::size_t p) {
  return min_trace_p(f.hessian(x), p);
}

Sectional sectional_curvatures(const ImplicitDomain &dom,
                               std::span<const double> q, const Frame &plane) {
  if (plane.plane_dim() != 2 || plane.ambient_dim() != dom.dim())
    throw FrameError("sectional curvatures need a 2-frame in R^" +
                     std::to_string(dom.dim()));
  const Vec nrm = outward_normal(dom, q);
  for (const Vec &v : plane.vectors())
    if (std::abs(dot(v, nrm)) > 1e-8)
      throw FrameError("plane is not tangent to bD (|v.n| = " +
                       std::to_string(std::abs(dot(v, nrm))) + ")");
  Sectional s;
  s.mu = eigenvalues(restrict_to(shape_operator(dom, q), plane));
  s.H = s.mu[0] + s.mu[1];
  s.K = s.mu[0] * s.mu[1];
  return s;
}

std::vector<Vec> collar_samples(const ImplicitDomain &dom,
                                const std::vector<Vec> &boundary, double depth,
                                std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Vec> out;
  for (const Vec &q : boundary) {
    const double t = depth * (1.0 - u(rng)); // (0, depth]
    const Vec x = axpy(q, -t, outward_normal(dom, q));
    if (!in_collar(dom, x))
      continue;
    const Projection pr = project(dom, x);
    const BoundaryPoint bp = principal_curvatures(dom, pr.foot);
    bool conditioned = true;
    for (double nu : bp.curvatures)
      conditioned = conditioned && 1.0 + pr.delta * nu >= kCollarMargin;
    if (conditioned)
      out.push_back(x);
  }
  return out;
}

NegLogDistReport neg_log_dist_check(const ImplicitDomain &dom, std::size_t p,
                                    const std::vector<Vec> &collar, Exec exec) {
  if (p < 1 || p > dom.dim())
    throw InvalidP("p = " + std::to_string(p));
  const ScalarField delta = delta_field(dom);
  const auto values = sweep(
      collar.size(),
      [&](std::size_t i) {
        const Jet j = delta.jet(collar[i], 2);
        if (!(j.value < 0.0))
          throw EvaluationError("-log(-delta) needs interior points, got delta = " +
                                std::to_string(j.value));
        // g = -log(-d): g' = -1/d, g'' = 1/d^2
        SymMatrix h = (-1.0 / j.value) * j.hessian;
        h += SymMatrix::outer(j.gradient, 1.0 / (j.value * j.value));
        return min_trace_p(h, p);
      },
      exec);
  NegLogDistReport rep;
  rep.p = p;
  rep.samples = collar.size();
  if (values.empty())
    return rep;
  const auto it = std::min_element(values.begin(), values.end());
  rep.min_value = *it;
  rep.argmin = collar[static_cast<std::size_t>(it - values.begin())];
  return rep;
}

} // namespace pconvex
