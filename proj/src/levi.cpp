#include "pconvex/levi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

void require_even(std::size_t n) {
  if (n % 2 != 0)
    throw DimensionError("complex structure needs even dimension, got " +
                         std::to_string(n));
}

Vec combine(const Frame &basis, std::span<const double> coords) {
  Vec v(basis.ambient_dim(), 0.0);
  for (std::size_t i = 0; i < coords.size(); ++i)
    v = axpy(v, coords[i], basis[i]);
  return v;
}

// Same complex line: |<v, w>|^2 + |<v, Jw>|^2 = 1 for unit v, w.
bool same_line(const Vec &v, const Vec &w) {
  const double a = dot(v, w), b = dot(v, apply_J(w));
  return a * a + b * b > 1.0 - 1e-9;
}

// J-adapted orthonormal basis (w1, Jw1, ...) of a J-invariant subspace.
Frame j_adapted(const Frame &space) {
  const std::size_t n = space.ambient_dim();
  std::vector<Vec> out;
  for (const Vec &cand : space.vectors()) {
    if (out.size() == space.plane_dim())
      break;
    Vec r = cand;
    for (const Vec &b : out)
      r = axpy(r, -dot(r, b), b);
    const double len = norm(r);
    if (len < 0.5)
      continue;
    r = scaled(r, 1.0 / len);
    Vec jr = apply_J(r);
    for (const Vec &b : out)
      jr = axpy(jr, -dot(jr, b), b);
    jr = scaled(jr, 1.0 / norm(jr));
    out.push_back(r);
    out.push_back(jr);
  }
  if (out.size() != space.plane_dim())
    throw FrameError("subspace is not J-invariant");
  return Frame(n, std::move(out), 1e-9);
}

struct BoundaryLevi {
  Vec point;
  Vec normal;
  Frame frame; // J-adapted complex tangent basis
  Spectrum spectrum; // of the Levi matrix restricted to the frame
  double levi_min = 0.0;
  Vec argmin;
};

BoundaryLevi boundary_levi(const ImplicitDomain &dom, std::span<const double> q) {
  BoundaryLevi b;
  b.point.assign(q.begin(), q.end());
  b.normal = outward_normal(dom, q);
  b.frame = complex_tangent_frame(dom, q);
  b.spectrum = eigh(restrict_to(levi_matrix(shape_operator(dom, q)), b.frame));
  b.levi_min = b.spectrum.eigenvalues.front();
  b.argmin = combine(b.frame, b.spectrum.eigenvectors.front());
  return b;
}

// Pattern search for a boundary point where the Levi form has a vanishing
// direction: minimizes |levi_min| over bD, taking the best of the 2(n-1)
// tangent moves at each step.
BoundaryLevi refine_degenerate(const ImplicitDomain &dom, BoundaryLevi best) {
  double h = 0.05 * dom.bbox().min_extent();
  for (int it = 0; it < 20000 && h > 1e-9 && best.levi_min != 0.0; ++it) {
    const Frame tangent = orthogonal_complement(dom.dim(), {best.normal});
    std::optional<BoundaryLevi> step;
    for (const Vec &d : tangent.vectors())
      for (double sgn : {1.0, -1.0}) {
        try {
          const Vec cand = project_to_boundary(dom, axpy(best.point, sgn * h, d));
          BoundaryLevi b = boundary_levi(dom, cand);
          // sufficient decrease, so moves along level directions of the
          // objective do not keep the step from shrinking
          const double bar = step ? std::abs(step->levi_min)
                                  : (1.0 - 1e-4) * std::abs(best.levi_min);
          if (std::abs(b.levi_min) < bar)
            step = std::move(b);
        } catch (const Error &) {
        }
      }
    if (step)
      best = std::move(*step);
    else
      h *= 0.5;
  }
  return best;
}

// Unit directions whose complex lines are examined at one sample: the
// eigen-directions of the restricted Levi matrix, each basis direction, and
// `angles` real rotations between each pair of complex basis directions.
std::vector<Vec> scan_lines(const BoundaryLevi &b, std::size_t angles) {
  std::vector<Vec> lines;
  auto push = [&](Vec v) {
    for (const Vec &w : lines)
      if (same_line(v, w))
        return;
    lines.push_back(std::move(v));
  };
  for (const Vec &c : b.spectrum.eigenvectors)
    push(combine(b.frame, c));
  const std::size_t m = b.frame.plane_dim() / 2;
  for (std::size_t i = 0; i < m; ++i)
    push(b.frame[2 * i]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t k = i + 1; k < m; ++k)
      for (std::size_t a = 1; a < angles; ++a) {
        const double th = std::numbers::pi * static_cast<double>(a) / angles;
        Vec v = axpy(scaled(b.frame[2 * i], std::cos(th)), std::sin(th), b.frame[2 * k]);
        lines.push_back(std::move(v)); // distinct by construction
      }
  return lines;
}

struct SampleResult {
  std::vector<DegenerateLine> degenerate;
  std::size_t lines = 0;
  // per t: min over all lines, min over degenerate lines, min slack
  std::vector<double> min_levi, min_degenerate, min_slack;
};

} // namespace

Vec apply_J(std::span<const double> v) {
  require_even(v.size());
  Vec out(v.size());
  for (std::size_t k = 0; k < v.size(); k += 2) {
    out[k] = -v[k + 1];
    out[k + 1] = v[k];
  }
  return out;
}

SymMatrix levi_matrix(const SymMatrix &h) {
  const std::size_t n = h.dim();
  require_even(n);
  // (J^T H J)_{ij} = sum_{kl} J_{ki} H_{kl} J_{lj}; J maps e_{2k} -> e_{2k+1}
  // and e_{2k+1} -> -e_{2k}, so J e_i = s(i) e_{i^1} with s = +1 on even i.
  SymMatrix m = h;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double si = (i % 2 == 0) ? 1.0 : -1.0;
      const double sj = (j % 2 == 0) ? 1.0 : -1.0;
      m.set(i, j, h(i, j) + si * sj * h(i ^ 1, j ^ 1));
    }
  return m;
}

double levi_form(const SymMatrix &h, std::span<const double> v) {
  require_even(v.size());
  if (v.size() != h.dim())
    throw DimensionError("direction and matrix dimensions differ");
  if (std::abs(norm(v) - 1.0) > 1e-8)
    throw FrameError("Levi form needs a unit direction");
  const Vec jv = apply_J(v);
  return h.form(v, v) + h.form(jv, jv);
}

double levi_form(const ScalarField &f, std::span<const double> x,
                 std::span<const double> v) {
  require_even(f.dim());
  return levi_form(f.hessian(x), v);
}

Frame complex_tangent_frame(const ImplicitDomain &dom, std::span<const double> q) {
  require_even(dom.dim());
  const Vec nrm = outward_normal(dom, q);
  return j_adapted(orthogonal_complement(dom.dim(), {nrm, apply_J(nrm)}));
}

LeviReport level_set_levi_check(const ImplicitDomain &dom,
                                const std::vector<double> &t_values,
                                const std::vector<Vec> &samples,
                                const LeviOptions &opts) {
  require_even(dom.dim());
  if (dom.dim() < 4)
    throw DimensionError("complex tangent lines need n >= 4");
  for (double t : t_values)
    if (!(t < 0.0))
      throw ConfigError("level-set offsets must be negative");
  if (samples.empty())
    throw SamplingError("no boundary samples");

  std::vector<BoundaryLevi> pts = sweep(
      samples.size(), [&](std::size_t i) { return boundary_levi(dom, samples[i]); },
      opts.exec);
  std::vector<bool> refined(pts.size(), false);
  if (opts.refine) {
    std::vector<std::size_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(pts[a].levi_min) < std::abs(pts[b].levi_min);
    });
    const std::size_t starts = std::min(opts.refine_starts, order.size());
    auto extra = sweep(
        starts, [&](std::size_t k) { return refine_degenerate(dom, pts[order[k]]); },
        opts.exec);
    for (auto &b : extra) {
      pts.push_back(std::move(b));
      refined.push_back(true);
    }
  }

  LeviReport rep;
  rep.boundary_min = pts.front().levi_min;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    rep.samples.push_back({pts[i].point, pts[i].levi_min, pts[i].argmin, refined[i]});
    rep.boundary_min = std::min(rep.boundary_min, pts[i].levi_min);
  }
  rep.pseudoconvex = rep.boundary_min >= -kTolLevi;

  const ScalarField delta = delta_field(dom);
  const std::size_t nt = t_values.size();
  auto results = sweep(pts.size(), [&](std::size_t i) {
    const BoundaryLevi &b = pts[i];
    const SymMatrix shape = shape_operator(dom, b.point);
    const std::vector<Vec> lines = scan_lines(b, opts.angles);
    SampleResult r;
    r.lines = lines.size();
    std::vector<double> l0(lines.size());
    std::vector<std::size_t> degen;
    for (std::size_t k = 0; k < lines.size(); ++k) {
      l0[k] = levi_form(shape, lines[k]);
      if (std::abs(l0[k]) <= kTolLevi) {
        degen.push_back(k);
        const Vec &v = lines[k];
        const Sectional s =
            sectional_curvatures(dom, b.point, Frame(dom.dim(), {v, apply_J(v)}, 1e-9));
        r.degenerate.push_back({i, v, l0[k], s.K, s.H});
      }
    }
    for (double t : t_values) {
      const Vec x = axpy(b.point, t, b.normal);
      const SymMatrix ht = delta.hessian(x);
      r.min_levi.push_back(eigh(restrict_to(levi_matrix(ht), b.frame)).eigenvalues.front());
      double dmin = std::numeric_limits<double>::infinity();
      double slack = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < lines.size(); ++k) {
        const double lt = levi_form(ht, lines[k]);
        slack = std::min(slack, lt - l0[k]);
        if (std::find(degen.begin(), degen.end(), k) != degen.end())
          dmin = std::min(dmin, lt);
      }
      r.min_degenerate.push_back(dmin);
      r.min_slack.push_back(slack);
    }
    return r;
  }, opts.exec);

  for (std::size_t j = 0; j < nt; ++j) {
    LeviLevelRow row;
    row.t = t_values[j];
    row.min_levi = std::numeric_limits<double>::infinity();
    row.min_levi_degenerate = std::numeric_limits<double>::infinity();
    row.min_slack = std::numeric_limits<double>::infinity();
    for (const SampleResult &r : results) {
      row.min_levi = std::min(row.min_levi, r.min_levi[j]);
      row.min_levi_degenerate = std::min(row.min_levi_degenerate, r.min_degenerate[j]);
      row.min_slack = std::min(row.min_slack, r.min_slack[j]);
      row.degenerate_lines += r.degenerate.size();
    }
    rep.rows.push_back(row);
  }
  for (SampleResult &r : results) {
    rep.lines_scanned += r.lines;
    for (DegenerateLine &d : r.degenerate) {
      if (std::abs(d.K) <= kTolK)
        rep.hypothesis_holds = false;
      rep.degenerate.push_back(std::move(d));
    }
  }
  return rep;
}

nlohmann::json to_json(const LeviReport &r) {
  auto num = [](double x) -> nlohmann::json {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
  };
  nlohmann::json samples = nlohmann::json::array();
  for (const LeviSample &s : r.samples)
    samples.push_back({{"point", s.point}, {"levi_min", s.levi_min},
                       {"direction", s.argmin}, {"refined", s.refined}});
  nlohmann::json degen = nlohmann::json::array();
  for (const DegenerateLine &d : r.degenerate)
    degen.push_back({{"sample", d.sample}, {"point", r.samples.at(d.sample).point},
                     {"direction", d.v}, {"levi", d.levi}, {"K", d.K}, {"H", d.H}});
  nlohmann::json rows = nlohmann::json::array();
  for (const LeviLevelRow &x : r.rows)
    rows.push_back({{"t", x.t}, {"min_levi", num(x.min_levi)},
                    {"min_levi_degenerate", num(x.min_levi_degenerate)},
                    {"degenerate_lines", x.degenerate_lines},
                    {"min_slack", num(x.min_slack)}});
  return {{"boundary_min", r.boundary_min},
          {"pseudoconvex", r.pseudoconvex},
          {"hypothesis_holds", r.hypothesis_holds},
          {"lines_scanned", r.lines_scanned},
          {"degenerate", degen},
          {"levels", rows},
          {"samples", samples}};
}

} // namespace pconvex
