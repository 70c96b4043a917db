#include <doctest.h>

#include <cmath>

#include "pconvex/distance.hpp"
#include "pconvex/error.hpp"

using namespace pconvex;

namespace {

// Points on bD by projecting random directions scaled near the boundary.
std::vector<Vec> boundary_points(const ImplicitDomain &d, int count,
                                 std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  std::vector<Vec> out;
  const Vec c = d.bbox().center();
  while (static_cast<int>(out.size()) < count) {
    Vec x = c;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const auto [lo, hi] = d.bbox().ranges[i];
      x[i] = lo + (hi - lo) * std::uniform_real_distribution<double>(0, 1)(rng);
    }
    try {
      out.push_back(project_to_boundary(d, x));
    } catch (const Error &) {
    }
  }
  return out;
}

// The torus tube distance, independent of the projection code.
double torus_delta(double ring, double tube, const Vec &x) {
  return std::hypot(std::hypot(x[0], x[1]) - ring, x[2]) - tube;
}

} // namespace

TEST_CASE("project_to_boundary examples") {
  const ImplicitDomain ball = catalog("ball", {1});
  for (const Vec &x : {Vec{0.5, 0, 0}, Vec{2, 0, 0}}) {
    const Vec q = project_to_boundary(ball, x);
    CHECK(std::abs(q[0] - 1.0) <= 1e-12);
    CHECK(std::abs(q[1]) <= 1e-12);
    CHECK(std::abs(q[2]) <= 1e-12);
  }
  const ImplicitDomain torus = catalog("solid_torus", {2.5, 1});
  const Vec q = project_to_boundary(torus, Vec{2.5, 0, 0.5});
  CHECK(std::abs(q[0] - 2.5) <= 1e-10);
  CHECK(std::abs(q[1]) <= 1e-10);
  CHECK(std::abs(q[2] - 1.0) <= 1e-10);
}

TEST_CASE("projection post-conditions and idempotence") {
  for (const ImplicitDomain &d :
       {catalog("ellipsoid", {1, 2, 3}), catalog("solid_torus", {2.5, 1}),
        catalog("perturbed_ball", {1, 0.3, 3})}) {
    CAPTURE(d.name());
    Rng rng(31);
    int checked = 0;
    for (const Vec &q0 : boundary_points(d, 60, 8)) {
      const Vec nrm = outward_normal(d, q0);
      const double t = std::uniform_real_distribution<double>(-0.2, 0.2)(rng);
      const Vec x = axpy(q0, t, nrm);
      Projection p;
      try {
        p = project(d, x);
      } catch (const ProjectionError &) {
        continue;
      }
      ++checked;
      CHECK(std::abs(d.rho0().value(p.foot)) <= 1e-10);
      const Vec r = sub(x, p.foot);
      if (norm(r) > 1e-9) {
        const double cosang = std::abs(dot(r, p.normal)) / norm(r);
        CHECK(std::acos(std::min(1.0, cosang)) <= 1e-6);
      }
      const Vec again = project_to_boundary(d, p.foot);
      CHECK(norm(sub(again, p.foot)) <= 1e-8);
      CHECK((p.delta < 0) == (d.rho0().value(x) < 0));
    }
    CHECK(checked >= 50);
  }
}

TEST_CASE("signed_distance examples") {
  const ImplicitDomain ball = catalog("ball", {1});
  CHECK(signed_distance(ball, Vec{0.25, 0, 0}) == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(signed_distance(ball, Vec{0, 0, 1}) == 0.0);
  CHECK(signed_distance(ball, Vec{0, 1.5, 0}) == doctest::Approx(0.5).epsilon(1e-12));
  const ImplicitDomain torus = catalog("solid_torus", {2.5, 1});
  CHECK(std::abs(signed_distance(torus, Vec{3.0, 0, 0}) + 0.5) <= 1e-10);

  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.8, 1.8);
  for (int k = 0; k < 200; ++k) {
    const Vec x = {2.5 + 0.7 * u(rng), 0.5 * u(rng), 0.7 * u(rng)};
    CHECK(std::abs(signed_distance(torus, x) - torus_delta(2.5, 1, x)) <= 1e-8);
  }
}

TEST_CASE("projection refuses points off the collar") {
  const ImplicitDomain ball = catalog("ball", {1});
  // the centre is equidistant to every boundary point
  CHECK_THROWS_AS(project(ball, Vec{0, 0, 0}), ProjectionError);
  CHECK_FALSE(in_collar(ball, Vec{0, 0, 0}));
  CHECK(in_collar(ball, Vec{0.3, 0, 0}));
}

TEST_CASE("delta_field") {
  const ImplicitDomain ball = catalog("ball", {1});
  const ScalarField delta = delta_field(ball);
  Rng rng(12);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> r(0.3, 1.3);
  for (int k = 0; k < 100; ++k) {
    Vec x = {g(rng), g(rng), g(rng)};
    x = scaled(x, r(rng) / norm(x));
    CHECK(std::abs(norm(delta.gradient(x)) - 1.0) <= 1e-7);
    // FD of values as an independent eikonal check
    CHECK(std::abs(norm(fd_gradient(delta, x)) - 1.0) <= 1e-6);
  }
  const Vec ev = eigenvalues(delta.hessian(Vec{0.5, 0, 0}));
  CHECK(std::abs(ev[0]) <= 1e-5);
  CHECK(std::abs(ev[1] - 2.0) <= 1e-5);
  CHECK(std::abs(ev[2] - 2.0) <= 1e-5);

  const ImplicitDomain ell = catalog("ellipsoid", {1, 2, 3});
  const ScalarField de = delta_field(ell);
  for (const Vec &q : boundary_points(ell, 20, 3)) {
    const Vec n0 = outward_normal(ell, q);
    for (double t : {-0.3, -0.15, 0.1, 0.3}) {
      const Vec gn = de.gradient(axpy(q, t, n0));
      CHECK(norm(sub(gn, n0)) <= 1e-6);
    }
  }
}

TEST_CASE("principal curvatures") {
  for (double r : {0.5, 1.0, 3.0}) {
    const ImplicitDomain b = catalog("ball", {r});
    const BoundaryPoint bp = principal_curvatures(b, Vec{0, r * 0.6, r * 0.8});
    for (double nu : bp.curvatures)
      CHECK(std::abs(nu - 1.0 / r) <= 1e-6);
  }

  const ImplicitDomain torus = catalog("solid_torus", {2.5, 1});
  const BoundaryPoint inner = principal_curvatures(torus, Vec{1.5, 0, 0});
  CHECK(std::abs(inner.curvatures[0] + 1.0 / 1.5) <= 1e-5);
  CHECK(std::abs(inner.curvatures[1] - 1.0) <= 1e-5);
  for (const Vec &d : inner.directions)
    CHECK(std::abs(dot(d, inner.inner_normal)) <= 1e-8);
  CHECK(inner.inner_normal[0] == doctest::Approx(1.0));

  // Spheroid x^2 + y^2 + z^2/4 = 1 near its tip: z = 2 sqrt(1 - r^2) ~ 2 - r^2,
  // so both curvatures are 2. Cross-check by FD of the foot-point normal.
  const ImplicitDomain sph = catalog("ellipsoid", {1, 1, 2});
  const BoundaryPoint tip = principal_curvatures(sph, Vec{0, 0, 2});
  CHECK(std::abs(tip.curvatures[0] - 2.0) <= 1e-5);
  CHECK(std::abs(tip.curvatures[1] - 2.0) <= 1e-5);
  const Vec fd = level_set_curvatures(sph, Vec{0, 0, 2});
  CHECK(std::abs(fd[0] - 2.0) <= 1e-5);
  CHECK(std::abs(fd[1] - 2.0) <= 1e-5);

  // Equator of the spheroid: 1 around the equator, a/c^2 = 1/4 along meridians
  const BoundaryPoint eq = principal_curvatures(sph, Vec{1, 0, 0});
  CHECK(std::abs(eq.curvatures[0] - 0.25) <= 1e-10);
  CHECK(std::abs(eq.curvatures[1] - 1.0) <= 1e-10);

  const ImplicitDomain weak =
      make_domain(parse_domain_argument(R"({"dim": 3, "expr": "x1^3 - x2",
          "bbox": [[-1, 1], [-1, 1], [-1, 1]]})"));
  CHECK_NOTHROW(principal_curvatures(weak, Vec{0, 0, 0}));
  const ImplicitDomain flat =
      make_domain(parse_domain_argument(R"({"dim": 3, "expr": "x1^2 + x2^2 + x3^2",
          "bbox": [[-1, 1], [-1, 1], [-1, 1]]})"));
  CHECK_THROWS_AS(principal_curvatures(flat, Vec{0, 0, 0}), DegenerateGradient);
}

TEST_CASE("shape operator matches Hess delta at boundary points") {
  const ImplicitDomain torus = catalog("solid_torus", {2.5, 1});
  const ScalarField delta = delta_field(torus);
  for (const Vec &q : boundary_points(torus, 10, 21)) {
    const SymMatrix s = shape_operator(torus, q);
    const SymMatrix h = delta.hessian(q);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        CHECK(std::abs(s(i, j) - h(i, j)) <= 1e-6);
  }
}

TEST_CASE("curvature transport") {
  const ImplicitDomain ball = catalog("ball", {1});
  const auto exact =
      curvature_transport_check(ball, Vec{1, 0, 0}, {-0.3}, ball_distance_field(1, 3));
  CHECK(std::abs(exact.rows[0].predicted[0] - 1.0 / 0.7) <= 1e-12);
  CHECK(exact.max_rel_error <= 1e-5);
  const auto fd = curvature_transport_check(ball, Vec{1, 0, 0}, {-0.3});
  CHECK(std::abs(fd.rows[0].measured[0] - 1.0 / 0.7) <= 1e-5);

  const ImplicitDomain torus = catalog("solid_torus", {2.5, 1});
  const auto outer = curvature_transport_check(torus, Vec{3.5, 0, 0}, {0.0, -0.2});
  CHECK(outer.rows[0].predicted == outer.curvatures);
  CHECK(outer.rows[0].max_rel_error <= 1e-5);
  CHECK(outer.rows[1].max_rel_error <= 1e-4);
  // outer equator: nu = {1/3.5, 1}, transported by t = -0.2
  CHECK(std::abs(outer.rows[1].predicted[0] - (1 / 3.5) / (1 - 0.2 / 3.5)) <= 1e-12);
  CHECK(std::abs(outer.rows[1].normal_eigenvalue) <= 1e-5);
}

TEST_CASE("transport properties on sampled collars") {
  for (const ImplicitDomain &d :
       {catalog("ellipsoid", {1, 2, 3}), catalog("solid_torus", {2.5, 1})}) {
    CAPTURE(d.name());
    for (const Vec &q : boundary_points(d, 8, 40)) {
      const auto rep = curvature_transport_check(d, q, {-0.2, -0.1, -0.05, 0.05});
      CHECK(rep.max_rel_error <= 1e-3);
      for (const auto &row : rep.rows) {
        CHECK(std::abs(row.normal_eigenvalue) <= 1e-5);
        if (row.t < 0)
          for (std::size_t i = 0; i < rep.curvatures.size(); ++i)
            CHECK(row.measured[i] >= rep.curvatures[i] - 1e-6);
      }
    }
  }
}
