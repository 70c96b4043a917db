#pragma once

// Synthesis of a p-plurisubharmonic defining function
//
//   rho~ = phi(h(delta)) + eps * chi * |x|^2
//
// for a p-convex domain, with h convexifying the normal direction, phi
// flattening the deep interior to a constant, and chi a cut-off that is 1
// away from bD and 0 near it.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pconvex/pconvexity.hpp"

namespace pconvex {

struct Triple {
  double f = 0.0, d1 = 0.0, d2 = 0.0;
};

// Quintic smoothstep S(u) = 6u^5 - 15u^4 + 10u^3 clamped to [0, 1], with
// first and second derivatives.
Triple smoothstep(double u);

// h(t) = (e^{at} - 1) / a: h(0) = 0, h'(0) = 1, h'' = a h' > 0.
class ExpH {
public:
  explicit ExpH(double a);
  double a() const { return a_; }
  Triple operator()(double t) const;
  // log(1 + a c) / a; requires 1 + a c > 0.
  double inverse(double c) const;

private:
  double a_;
};

// Convex, non-decreasing C^2 function with phi = 2c/3 for t <= c and
// phi(t) = t for t >= c/2. On [5c/6, c/2] phi' is a quintic smoothstep
// ramp from 0 to 1; below 5c/6 phi is constant. The constructor checks
// convexity and the clamp values by dense sampling and throws
// ConstructionError on failure.
class Phi {
public:
  explicit Phi(double c);
  double c() const { return c_; }
  Triple operator()(double t) const;
  double ramp_start() const { return 5.0 * c_ / 6.0; }

private:
  double c_;
};

// chi as a function of delta: 1 for delta <= c/3, 0 for delta >= c/6.
Triple chi_of_delta(double c, double delta);

struct GridSpec {
  std::size_t interior = 2000;
  std::size_t collar = 2000;
  std::size_t boundary = 500;
  std::uint64_t seed = 1;
};

struct SynthesisParams {
  std::size_t p = 2;
  double a = 0.0;
  double c = 0.0;
  double eps = 0.0;
  double margin_a = 0.1;
  double collar_depth = 0.0; // probe depth d_max, c = -0.25 d_max
  GridSpec grid;

  std::pair<double, double> chi_transition() const { return {c / 3.0, c / 6.0}; }
  std::pair<double, double> phi_transition() const { return {5.0 * c / 6.0, c / 2.0}; }
  // Throws ConfigError unless c < 0, a > 0, eps >= 0 and 1 + a c > 0.
  void validate() const;
};

struct Grid {
  std::vector<Vec> interior; // rejection samples of {rho0 < 0}
  std::vector<Vec> collar;   // delta in [c, 0)
  std::vector<Vec> boundary; // on bD
};

Grid make_grid(const ImplicitDomain &dom, double c, const GridSpec &spec);

struct Certificate {
  std::size_t p = 0;
  std::size_t n_interior = 0, n_collar = 0, n_boundary = 0;
  double dbar_min = 0.0; // over every grid sample
  Vec dbar_argmin;
  double interior_min = 0.0; // over the interior samples
  Vec interior_argmin;
  double collar_min = 0.0;
  double boundary_min = 0.0;
  double max_interior_value = 0.0;  // max rho~ over interior and collar samples
  double max_boundary_abs = 0.0;    // max |rho~| on boundary samples
  double min_boundary_grad = 0.0;   // min |grad rho~| on boundary samples
  // random-frame spot check at dbar_argmin
  std::size_t spot_frames = 0;
  double spot_min_trace = 0.0;  // min over sampled p-frames
  double spot_eigen_gap = 0.0;  // |trace on eigenframe - formula|
  bool spot_ok = false;
  bool strong_expected = false; // no p-flat boundary points were found
  bool passed = false;          // dbar_min >= -tol_cert (and interior_min > 0 if strong_expected)
};

struct EpsilonChoice {
  double eps = 0.0;
  int k = -1; // eps = 2^-k, -1 when no k worked
  bool warning = false;
  double interior_min = 0.0; // at the accepted eps
  double boundary_collar_min = 0.0;
};

struct Parts {
  bool deep = false;   // phi is constant and chi = 1; no projection used
  double delta = 0.0;  // signed distance, unset when deep
  double base = 0.0;   // phi(h(delta))
  double chi_psi = 0.0; // chi |x|^2
  Vec base_grad, chi_psi_grad;
  SymMatrix base_hess, chi_psi_hess;
};

class DefiningFunction {
public:
  DefiningFunction(ImplicitDomain dom, SynthesisParams params);

  const ImplicitDomain &domain() const { return dom_; }
  const SynthesisParams &params() const { return params_; }
  const ScalarField &field() const { return field_; }

  // Components at x; order as in ScalarField::jet.
  Parts parts(std::span<const double> x, int order = 2) const;

  std::optional<Certificate> certificate;
  std::optional<PConvexityReport> boundary_report;
  std::optional<EpsilonChoice> epsilon;
  // certify_boundary found no p-flat points, so strictness on D is expected
  bool no_p_flat = false;

  // Domain spec, parameters and certificate; enough to rebuild the field.
  nlohmann::json to_json() const;
  static DefiningFunction from_json(const nlohmann::json &j);

private:
  ImplicitDomain dom_;
  SynthesisParams params_;
  ScalarField field_;
};

// a = max(0, -min_q (nu_1 + ... + nu_{p-1})(q)) + margin. For p = 2 this is
// max(0, -min nu_1) + margin.
double choose_a(const ImplicitDomain &dom, const std::vector<Vec> &boundary,
                double margin, std::size_t p = 2);
double choose_a(const PConvexityReport &report, double margin);

// Largest depth d on the probe ladder k/100 * (min box extent / 2) such that
// every probe q - d n(q) projects back to q with delta = -d.
double probe_collar_depth(const ImplicitDomain &dom,
                          const std::vector<Vec> &boundary);

// Hess(h o delta) = h'(delta) Hess delta + h''(delta) grad delta grad delta^T
SymMatrix composite_hessian(const ExpH &h, const Jet &delta);
SymMatrix composite_hessian(const ExpH &h, const ScalarField &delta,
                            std::span<const double> x);

ScalarField chi_field(const ImplicitDomain &dom, double c);

// Largest eps = 2^-k, k = 0..40, such that the interior minimum of
// min_trace_p(Hess rho~) is > 0, the collar/boundary minimum >= -kTolCert and
// rho~ < 0 on interior and collar samples. Returns eps = 0 with a warning
// when none works.
EpsilonChoice choose_epsilon(const DefiningFunction &base, std::size_t p,
                             const Grid &grid, Exec exec = Exec::parallel);

Certificate verify(const DefiningFunction &df, std::size_t p, const Grid &grid,
                   Exec exec = Exec::parallel);

struct SynthesisOptions {
  double margin_a = 0.1;
  GridSpec grid;
  std::size_t certify_samples = 500;
  std::size_t probe_samples = 50;
  // Refuse domains whose boundary is not certified p-convex.
  bool require_p_convex = true;
  Exec exec = Exec::parallel;
};

// Throws NotPConvex when certification fails (unless disabled) and
// ProjectionError when no collar depth could be certified.
DefiningFunction synthesize(const ImplicitDomain &dom, std::size_t p,
                            const SynthesisOptions &opts = {});

nlohmann::json to_json(const SynthesisParams &params);
SynthesisParams params_from_json(const nlohmann::json &j);
nlohmann::json to_json(const Certificate &cert);
nlohmann::json to_json(const EpsilonChoice &eps);

struct LevelSetRow {
  double t = 0.0;
  std::size_t samples = 0;
  double min_sp = 0.0;
  Vec argmin;
};

struct LevelSetReport {
  std::size_t p = 0;
  std::vector<LevelSetRow> rows;
  bool monotone = true; // min s_p non-decreasing as t decreases (tol 1e-6)
};

// Boundaries {delta = t}: each boundary sample is marched inward by |t|
// along the normal and s_p is taken from Hess delta there. t = 0 uses the
// analytic boundary curvatures.
LevelSetReport level_set_family_check(const ImplicitDomain &dom, std::size_t p,
                                      const std::vector<double> &t_values,
                                      const std::vector<Vec> &boundary,
                                      Exec exec = Exec::parallel);

} // namespace pconvex
