#pragma once

// Boundary p-convexity certification from sampled principal curvatures,
// pointwise p-plurisubharmonicity, and sectional curvatures of tangent
// 2-planes.

#include <cstdint>
#include <string>
#include <vector>

#include "pconvex/distance.hpp"
#include "pconvex/parallel.hpp"

namespace pconvex {

inline constexpr double kTolFlat = 1e-6;
inline constexpr double kTolCert = 1e-6;
inline constexpr double kTolStrict = 1e-6;

// Points on bD from random bbox pairs bracketing a sign change of rho0,
// bisected and then projected. Deterministic for a fixed seed. Throws
// SamplingError when fewer than `count` points are found within
// 1000 * count attempts.
std::vector<Vec> sample_boundary(const ImplicitDomain &dom, std::size_t count,
                                 std::uint64_t seed);

enum class Verdict { strongly_p_convex, p_convex, not_p_convex, inconclusive };
std::string to_string(Verdict v);

struct CurvatureSample {
  Vec point;
  Vec curvatures;
  double s_p = 0.0;
  bool refined = false; // added by the local minimum search
};

struct PConvexityReport {
  std::size_t p = 0;
  std::vector<CurvatureSample> samples;
  double min_sp = 0.0;
  std::size_t argmin = 0;
  std::vector<Vec> p_flat_points;
  Verdict verdict = Verdict::inconclusive;
};

struct CertifyOptions {
  // Pattern search for the minimum of s_p over bD started from the lowest
  // samples; refined points are appended to the sample list.
  bool refine = true;
  std::size_t refine_starts = 3;
  Exec exec = Exec::parallel;
};

// Verdicts: strongly-p-convex when min_sp > kTolStrict with no p-flat points,
// p-convex when min_sp >= -kTolCert, not-p-convex when min_sp < -10 kTolCert,
// inconclusive in between.
PConvexityReport certify_boundary(const ImplicitDomain &dom, std::size_t p,
                                  const std::vector<Vec> &samples,
                                  const CertifyOptions &opts = {});

// min over p-planes of tr Hess f(x), i.e. the sum of the p smallest Hessian
// eigenvalues. Non-negative iff f is p-psh at x.
double is_p_psh_at(const ScalarField &f, std::span<const double> x,
                   std::size_t p);

struct Sectional {
  double H = 0.0; // mu1 + mu2
  double K = 0.0; // mu1 * mu2
  Vec mu;         // eigenvalues of the second fundamental form on the plane
};

// Throws FrameError unless `plane` is a 2-frame tangent to bD at q within
// 1e-8.
Sectional sectional_curvatures(const ImplicitDomain &dom,
                               std::span<const double> q, const Frame &plane);

// Keep collar samples this far from the focal set: 1 + delta nu_i >= margin.
// Closer in, Hess delta grows like 1/(1 + delta nu) and difference stencils
// can straddle the cut locus.
inline constexpr double kCollarMargin = 0.1;

// Interior points q - t * n(q) with t uniform in (0, depth], kept only where
// the projection is certified and kCollarMargin holds.
std::vector<Vec> collar_samples(const ImplicitDomain &dom,
                                const std::vector<Vec> &boundary, double depth,
                                std::uint64_t seed);

struct NegLogDistReport {
  std::size_t p = 0;
  std::size_t samples = 0;
  double min_value = 0.0;
  Vec argmin;
};

// min_trace_p of Hess(-log(-delta)) over interior collar points.
NegLogDistReport neg_log_dist_check(const ImplicitDomain &dom, std::size_t p,
                                    const std::vector<Vec> &collar,
                                    Exec exec = Exec::parallel);

} // namespace pconvex
