#pragma once

// Conformal harmonic patches and subharmonicity of rho o f along them.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pconvex/field.hpp"
#include "pconvex/parallel.hpp"

namespace pconvex {

inline constexpr double kTolBd = 1e-8;        // image-in-closure tolerance
inline constexpr double kTolMapInvariant = 1e-8;
inline constexpr double kStencilStep = 1e-3;

enum class MapTag { affine_plane, catenoid_patch, helicoid_patch, enneper_patch };
std::string to_string(MapTag tag);
MapTag map_tag_from_string(const std::string &s); // throws ConfigError

struct ParamRect {
  double u0 = -1.0, u1 = 1.0, v0 = -1.0, v1 = 1.0;
};

// f, its first and second parameter derivatives at (u, v)
struct MapJet {
  Vec f, fu, fv, fuu, fuv, fvv;
};

// Gaussian bump added along the third axis; a non-harmonic perturbation used
// as a negative control.
struct Bump {
  double amplitude = 0.0;
  double width = 0.25;
  double uc = 0.0, vc = 0.0;
};

// f(u, v) = offset + scale * E g(u, v), where g is one of the standard
// isothermal surfaces in R^3 and E has orthonormal columns axes[0..2] in R^n:
//   affine_plane  (u, v, 0)
//   catenoid      (cosh v cos u, cosh v sin u, v)
//   helicoid      (sinh v cos u, sinh v sin u, u)
//   enneper       (u - u^3/3 + u v^2, v - v^3/3 + u^2 v, u^2 - v^2)
// Scaling, translation and the isometric embedding preserve harmonicity and
// conformality.
class ConformalHarmonicMap {
public:
  ConformalHarmonicMap(MapTag tag, ParamRect rect, std::size_t n = 3);

  // Rescaled and translated so the image of `rect` lies in the closed ball
  // of `radius` about `center`, with the image's bounding-ball centre
  // (estimated on a 101 x 101 lattice) placed at `center`.
  static ConformalHarmonicMap fitted(MapTag tag, ParamRect rect,
                                     const Vec &center, double radius);

  MapTag tag() const { return tag_; }
  const ParamRect &rect() const { return rect_; }
  std::size_t dim() const { return n_; }
  double scale() const { return scale_; }
  const Vec &offset() const { return offset_; }
  const std::array<Vec, 3> &axes() const { return axes_; }
  const Bump &bump() const { return bump_; }

  void set_transform(double scale, Vec offset);
  // Columns must be orthonormal in R^n (tolerance 1e-12), else FrameError.
  void set_axes(std::array<Vec, 3> axes);
  void set_bump(Bump b) { bump_ = b; }

  MapJet jet(double u, double v) const;
  Vec operator()(double u, double v) const { return jet(u, v).f; }

  nlohmann::json to_json() const;
  static ConformalHarmonicMap from_json(const nlohmann::json &j);

private:
  MapTag tag_;
  ParamRect rect_;
  std::size_t n_;
  double scale_ = 1.0;
  Vec offset_;
  std::array<Vec, 3> axes_;
  Bump bump_;
};

struct MapResiduals {
  double harmonic = 0.0;   // max |f_uu + f_vv|
  double conformal = 0.0;  // max ||f_u|^2 - |f_v|^2|
  double orthogonal = 0.0; // max |f_u . f_v|
  double worst() const;
};

// Residuals over `count` uniform random parameter points.
MapResiduals map_residuals(const ConformalHarmonicMap &f, std::size_t count,
                           std::uint64_t seed);
// Throws MapInvariantError when a residual exceeds kTolMapInvariant.
void check_map_invariants(const ConformalHarmonicMap &f, std::size_t count = 1000,
                          std::uint64_t seed = 1);

struct PullbackTerms {
  double chain = 0.0;     // H(f_u, f_u) + H(f_v, f_v)
  double conformal = 0.0; // |f_u|^2 trace of H on span{f_u, f_v}
  double full = 0.0;      // chain + grad rho . (f_uu + f_vv)
};

PullbackTerms pullback_terms(const ScalarField &rho, const ConformalHarmonicMap &f,
                             double u, double v);

// Laplacian of rho o f for a conformal harmonic f. Throws MapInvariantError
// when the conformal-factor form disagrees by more than 1e-8 (1 + |value|).
double pullback_laplacian(const ScalarField &rho, const ConformalHarmonicMap &f,
                          double u, double v);

// Five-point Laplacian of rho o f with step h.
double stencil_laplacian(const ScalarField &rho, const ConformalHarmonicMap &f,
                         double u, double v, double h = kStencilStep);

// nu x nv lattice over the parameter rectangle, edges included.
struct ParamGrid {
  std::size_t nu = 25, nv = 20;
  std::size_t size() const { return nu * nv; }
  std::array<double, 2> at(const ParamRect &r, std::size_t k) const;
};

enum class Dichotomy { interior, boundary, mixed };
std::string to_string(Dichotomy d);

struct HarmonicRow {
  double u = 0.0, v = 0.0;
  double value = 0.0;     // rho(f(u, v))
  double laplacian = 0.0; // chain-rule pullback Laplacian
  double stencil = 0.0;
};

struct SubharmonicityReport {
  std::vector<HarmonicRow> rows;
  double min_laplacian = 0.0;
  std::size_t argmin = 0;
  // max |chain - stencil| / max(1, |chain|); the stencil's O(h^2) error
  // grows with the size of the fourth derivatives of rho o f
  double max_stencil_gap = 0.0;
  double max_value = 0.0;
  std::size_t argmax = 0;
  Dichotomy dichotomy = Dichotomy::interior;
  MapResiduals residuals;
};

// Checks the map invariants, then containment rho(f) <= kTolBd on the grid
// (ImageOutsideDomain with the witness otherwise), then sweeps.
SubharmonicityReport subharmonicity_sweep(const ScalarField &rho,
                                          const ConformalHarmonicMap &f,
                                          const ParamGrid &grid = {},
                                          Exec exec = Exec::parallel);

struct DichotomyResult {
  Dichotomy flag = Dichotomy::interior;
  double max_value = 0.0;
  std::array<double, 2> touch{}; // parameter of the largest value
  Vec touch_point;
};

// interior if max rho(f) < -kTolBd, boundary if |rho(f)| <= kTolBd on the
// whole grid, mixed otherwise. Throws ImageOutsideDomain like the sweep.
DichotomyResult dichotomy_flag(const ScalarField &rho, const ConformalHarmonicMap &f,
                               const ParamGrid &grid = {},
                               Exec exec = Exec::parallel);

nlohmann::json to_json(const SubharmonicityReport &r);
nlohmann::json to_json(const MapResiduals &r);

} // namespace pconvex
