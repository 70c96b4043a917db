#pragma once

// Signed distance to the boundary of an implicit domain, nearest-point
// projection onto it, and principal curvatures of the boundary.
//
// Conventions: delta < 0 inside D, grad delta is the outward unit normal, and
// principal curvatures are taken with respect to the inner normal so that the
// unit sphere has all curvatures equal to +1.

#include <optional>
#include <vector>

#include "pconvex/domain.hpp"
#include "pconvex/field.hpp"

namespace pconvex {

inline constexpr double kBoundaryTol = 1e-8;
inline constexpr int kProjectionMaxIter = 100;

struct Projection {
  Vec foot;            // nearest boundary point
  double delta = 0.0;  // signed distance
  Vec normal;          // outward unit normal at the foot, equals grad delta
  int iterations = 0;  // Newton iterations used
  bool fallback = false; // projected-gradient fallback was needed
};

// Damped Newton on the Lagrange system, with a projected-gradient fallback.
// The foot must pass the second-order test 1 + delta * nu_i(foot) > 0 for all
// i; otherwise ProjectionError (x is outside the reliable collar).
Projection project(const ImplicitDomain &dom, std::span<const double> x);

Vec project_to_boundary(const ImplicitDomain &dom, std::span<const double> x);
double signed_distance(const ImplicitDomain &dom, std::span<const double> x);

// True when project() succeeds at x.
bool in_collar(const ImplicitDomain &dom, std::span<const double> x);

// Outward unit normal grad rho0 / |grad rho0|; DegenerateGradient when
// |grad rho0| < kMinGradient.
Vec outward_normal(const ImplicitDomain &dom, std::span<const double> q);

// Second fundamental form as an n x n matrix: P Hess(rho0) P / |grad rho0|
// with P the tangential projector. Equals Hess delta at a boundary point.
SymMatrix shape_operator(const ImplicitDomain &dom, std::span<const double> q);

struct BoundaryPoint {
  Vec point;
  Vec inner_normal;
  Vec curvatures;              // nu_1 <= ... <= nu_{n-1}
  std::vector<Vec> directions; // orthonormal principal directions
  Frame tangent_frame() const;
};

BoundaryPoint principal_curvatures(const ImplicitDomain &dom,
                                   std::span<const double> q);

// delta as a field: value by projection, gradient = normal at the foot,
// Hessian by central differences of that gradient.
ScalarField delta_field(const ImplicitDomain &dom);

// |x| - R with exact derivatives; the signed distance of a ball.
ScalarField ball_distance_field(double radius, std::size_t n);

struct TransportRow {
  double t = 0.0;
  Vec predicted; // nu_i / (1 + t nu_i), ascending
  Vec measured;  // eigenvalues of Hess delta on the tangent space, ascending
  double normal_eigenvalue = 0.0; // Hess delta (n, n) at the line point
  double max_rel_error = 0.0;
};

struct TransportReport {
  Vec point;
  Vec curvatures;
  std::vector<TransportRow> rows;
  double max_rel_error = 0.0;
};

// Compares Hess delta along the normal line q + t grad delta(q) against the
// transported curvatures. `delta` defaults to delta_field(dom). Relative
// error is |measured - predicted| / max(|predicted|, 1e-6).
TransportReport curvature_transport_check(
    const ImplicitDomain &dom, std::span<const double> q,
    const std::vector<double> &t_values,
    const std::optional<ScalarField> &delta = std::nullopt);

// Eigen-decomposition of Hess delta at x restricted to grad delta(x)^perp.
// These are the principal curvatures of the level set {delta = delta(x)}.
Vec level_set_curvatures(const ImplicitDomain &dom, std::span<const double> x);

} // namespace pconvex
