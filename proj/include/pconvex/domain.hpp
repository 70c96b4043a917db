#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pconvex/field.hpp"

namespace pconvex {

struct Box {
  std::vector<std::pair<double, double>> ranges;

  std::size_t dim() const { return ranges.size(); }
  bool contains(std::span<const double> x) const;
  double diameter() const;
  double min_extent() const;
  Vec center() const;
};

/// Where a domain came from: a catalog entry or an expression. Round-trips
/// through JSON so exported defining functions can be rebuilt exactly.
struct DomainSpec {
  std::string name;
  std::size_t dim = 0;
  std::optional<std::string> expr;
  std::string catalog_kind;           // empty for expression domains
  std::vector<double> catalog_params; // positional, see catalog()
  std::optional<Box> bbox;            // required for expression domains
};

/// Bounded domain D = {rho0 < 0} inside a bounding box.
class ImplicitDomain {
public:
  ImplicitDomain(DomainSpec spec, ScalarField rho0, Box bbox);

  const DomainSpec &spec() const { return spec_; }
  const std::string &name() const { return spec_.name; }
  std::size_t dim() const { return rho0_.dim(); }
  const ScalarField &rho0() const { return rho0_; }
  const Box &bbox() const { return bbox_; }
  bool inside(std::span<const double> x) const { return rho0_.value(x) < 0.0; }

  // Upper bound for |grad rho0| over the box, estimated on a lattice and
  // inflated by 25%. dist(x, bD) >= -rho0(x) / gradient_bound() inside D.
  double gradient_bound() const { return grad_bound_; }

private:
  DomainSpec spec_;
  ScalarField rho0_;
  Box bbox_;
  double grad_bound_ = 0.0;
};

inline constexpr double kMinGradient = 1e-6;

// Analytic test domains:
//   ball            R [, n=3]             |x|^2 - R^2
//   ellipsoid       a1..an                sum x_i^2/a_i^2 - 1
//   solid_torus     R_ring, r_tube        (sqrt(x^2+y^2) - R)^2 + z^2 - r^2
//   perturbed_ball  R, amp, freq [, n=3]  |x|^2 - R^2 + amp R^2 cos(freq x1/R)
//   complex_egg     k                     |z|^(2k) + |w|^2 - 1  on C^2 = R^4
//   hartogs_example [m=0]                 Re w + Re z^2 + |w|^2 + |z|^4 + m
// with z = x1 + i x2, w = x3 + i x4. Throws CatalogError on bad parameters.
ImplicitDomain catalog(const std::string &kind,
                       const std::vector<double> &params);

ImplicitDomain make_domain(const DomainSpec &spec);

// "catalog:kind:p1,p2,..." shorthand, a path to a JSON file, or inline JSON.
DomainSpec parse_domain_argument(const std::string &arg);

DomainSpec domain_spec_from_json(const nlohmann::json &j);
nlohmann::json to_json(const DomainSpec &spec);

} // namespace pconvex
