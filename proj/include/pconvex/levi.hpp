#pragma once

// Levi form on R^{2m} = C^m with J e_{2k-1} = e_{2k}, J e_{2k} = -e_{2k-1},
// complex tangent spaces of bD, and strong pseudoconvexity of the interior
// level sets {delta = t} near Levi-degenerate boundary points.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "pconvex/pconvexity.hpp"

namespace pconvex {

inline constexpr double kTolLevi = 1e-6; // Levi form counts as vanishing
inline constexpr double kTolK = 1e-6;    // sectional Gauss curvature counts as zero

// Jv; throws DimensionError for odd length.
Vec apply_J(std::span<const double> v);

// H + J^T H J, whose quadratic form is v -> H(v, v) + H(Jv, Jv).
SymMatrix levi_matrix(const SymMatrix &h);

// Restricted Hessian trace over the complex line span{v, Jv}. v must be a
// unit vector (FrameError otherwise); odd dimension gives DimensionError.
double levi_form(const SymMatrix &h, std::span<const double> v);
double levi_form(const ScalarField &f, std::span<const double> x,
                 std::span<const double> v);

// Orthonormal basis (w1, Jw1, w2, Jw2, ...) of T_q bD cap J T_q bD, the
// orthogonal complement of {n, Jn} with n the unit normal at q.
Frame complex_tangent_frame(const ImplicitDomain &dom, std::span<const double> q);

struct DegenerateLine {
  std::size_t sample = 0; // index into LeviReport::samples
  Vec v;                  // the line is span{v, Jv}
  double levi = 0.0;      // boundary Levi form on the line
  double K = 0.0;         // Gauss curvature of the second fundamental form there
  double H = 0.0;
};

struct LeviSample {
  Vec point;
  double levi_min = 0.0; // min over complex tangent lines at the boundary
  Vec argmin;            // direction attaining it
  bool refined = false;
};

struct LeviLevelRow {
  double t = 0.0;
  double min_levi = 0.0;            // over all samples and complex tangent lines
  double min_levi_degenerate = 0.0; // over the degenerate lines only
  std::size_t degenerate_lines = 0;
  // min over sampled lines of levi(q + t n, v) - levi(q, v)
  double min_slack = 0.0;
};

struct LeviReport {
  std::vector<LeviSample> samples;
  double boundary_min = 0.0;
  bool pseudoconvex = false; // boundary_min >= -kTolLevi
  std::vector<DegenerateLine> degenerate;
  // every degenerate line found has |K| > kTolK (vacuously true if none)
  bool hypothesis_holds = true;
  std::size_t lines_scanned = 0;
  std::vector<LeviLevelRow> rows;
};

struct LeviOptions {
  std::size_t angles = 64; // per pair of complex basis directions
  // Pattern search for Levi-degenerate boundary points started from the
  // samples with the smallest boundary Levi minimum.
  bool refine = true;
  std::size_t refine_starts = 3;
  Exec exec = Exec::parallel;
};

// Boundary Levi forms from the analytic second fundamental form; interior
// Levi forms at q + t n(q) from the Hessian of delta. Requires t < 0.
LeviReport level_set_levi_check(const ImplicitDomain &dom,
                                const std::vector<double> &t_values,
                                const std::vector<Vec> &samples,
                                const LeviOptions &opts = {});

nlohmann::json to_json(const LeviReport &r);

} // namespace pconvex
