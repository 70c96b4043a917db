#include <doctest.h>

#include <cmath>

#include "pconvex/error.hpp"
#include "pconvex/expr.hpp"
#include "pconvex/levi.hpp"

using namespace pconvex;

namespace {

Vec random_unit(std::size_t n, Rng &rng) {
  return random_frame(n, 1, rng)[0];
}

SymMatrix random_sym(std::size_t n, Rng &rng) {
  std::normal_distribution<double> N;
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      m.set(i, j, N(rng));
  return m;
}

} // namespace

TEST_CASE("complex structure") {
  Rng rng(11);
  for (std::size_t n : {2u, 4u, 8u}) {
    for (int k = 0; k < 50; ++k) {
      const Vec v = random_unit(n, rng), w = random_unit(n, rng);
      const Vec jjv = apply_J(apply_J(v));
      for (std::size_t i = 0; i < n; ++i)
        CHECK(jjv[i] == -v[i]);
      CHECK(std::abs(dot(apply_J(v), apply_J(w)) - dot(v, w)) <= 1e-15);
      CHECK(std::abs(dot(v, apply_J(v))) <= 1e-15);
    }
  }
  CHECK(apply_J(Vec{1, 0, 0, 0}) == Vec{0, 1, 0, 0});
  CHECK(apply_J(Vec{0, 1, 0, 0}) == Vec{-1, 0, 0, 0});
  CHECK_THROWS_AS(apply_J(Vec{1, 0, 0}), DimensionError);
  CHECK_THROWS_AS(levi_form(SymMatrix::identity(3), Vec{1, 0, 0}), DimensionError);
}

TEST_CASE("levi_form examples") {
  Rng rng(5);
  const ScalarField sq = parse_field("x1^2 + x2^2 + x3^2 + x4^2", 4);
  const ScalarField re_z2 = parse_field("x1^2 - x2^2", 4);
  for (int k = 0; k < 20; ++k) {
    const Vec x = random_unit(4, rng), v = random_unit(4, rng);
    CHECK(levi_form(sq, x, v) == doctest::Approx(4.0).epsilon(1e-14));
    const double th = 0.3 * k;
    CHECK(std::abs(levi_form(re_z2, x, Vec{std::cos(th), std::sin(th), 0, 0})) <= 1e-14);
  }

  // |z|^4: the trace over the z-line is the real Laplacian 16|z|^2, i.e. four
  // times d^2/dz dzbar |z|^4 = 4|z|^2
  const ScalarField z4 = parse_field("(x1^2 + x2^2)^2", 4);
  CHECK(levi_form(z4, Vec{1, 0, 0, 0}, Vec{1, 0, 0, 0}) == doctest::Approx(16.0));
  CHECK(levi_form(z4, Vec{0, 0, 0.3, 0}, Vec{1, 0, 0, 0}) == 0.0);
  for (int k = 0; k < 20; ++k) {
    const Vec x = scaled(random_unit(4, rng), 1.3);
    const double th = 0.7 * k;
    const double zz = x[0] * x[0] + x[1] * x[1];
    CHECK(levi_form(z4, x, Vec{std::cos(th), std::sin(th), 0, 0}) ==
          doctest::Approx(4.0 * (4.0 * zz)).epsilon(1e-12));
  }
  CHECK_THROWS_AS(levi_form(SymMatrix::identity(4), Vec{1, 1, 0, 0}), FrameError);
}

TEST_CASE("levi_form properties") {
  Rng rng(8);
  for (int k = 0; k < 500; ++k) {
    const std::size_t n = 2 * (1 + k % 4);
    const SymMatrix h = random_sym(n, rng);
    const Vec v = random_unit(n, rng);
    // same complex line
    CHECK(levi_form(h, v) == doctest::Approx(levi_form(h, apply_J(v))).epsilon(1e-13));
    // a trace over a 2-plane, so bounded below by the 2-plane minimum
    CHECK(levi_form(h, v) >= min_trace_p(h, 2) - 1e-12);
    CHECK(std::abs(levi_matrix(h).form(v, v) - levi_form(h, v)) <= 1e-12);
    CHECK(std::abs(trace_on_plane(h, Frame(n, {v, apply_J(v)}, 1e-12)) - levi_form(h, v)) <=
          1e-12);
  }

  // 2-psh fields are psh
  const ScalarField f =
      parse_field("x1^2 + 3*x2^2 - x3^2 + 2*x4^2 + x1*x3 + exp(0.3*x2)*x4^2", 4);
  std::size_t checked = 0;
  for (int k = 0; k < 300; ++k) {
    const Vec x = scaled(random_unit(4, rng), 0.5);
    if (is_p_psh_at(f, x, 2) < 0.0)
      continue;
    ++checked;
    for (int l = 0; l < 10; ++l)
      CHECK(levi_form(f, x, random_unit(4, rng)) >= -1e-10);
  }
  CHECK(checked > 100);
}

TEST_CASE("complex tangent frame") {
  const Frame b = complex_tangent_frame(catalog("ball", {1, 4}), Vec{1, 0, 0, 0});
  REQUIRE(b.plane_dim() == 2);
  for (const Vec &v : b.vectors()) {
    CHECK(std::abs(v[0]) <= 1e-12);
    CHECK(std::abs(v[1]) <= 1e-12);
  }

  const Frame e = complex_tangent_frame(catalog("complex_egg", {2}), Vec{0, 0, 1, 0});
  for (const Vec &v : e.vectors()) {
    CHECK(std::abs(v[2]) <= 1e-12);
    CHECK(std::abs(v[3]) <= 1e-12);
  }

  const ImplicitDomain h = catalog("hartogs_example", {});
  const ImplicitDomain six = catalog("ellipsoid", {1, 1.5, 2, 1, 1.2, 0.8});
  for (const ImplicitDomain *d : {&h, &six})
    for (const Vec &q : sample_boundary(*d, 20, 3)) {
      const Frame f = complex_tangent_frame(*d, q);
      const Vec nrm = outward_normal(*d, q);
      CHECK(f.plane_dim() == d->dim() - 2);
      const SymMatrix proj = f.projector();
      for (const Vec &v : f.vectors()) {
        CHECK(std::abs(dot(v, nrm)) <= 1e-12);
        CHECK(std::abs(dot(v, apply_J(nrm))) <= 1e-12);
        const Vec jv = apply_J(v);
        CHECK(norm(sub(proj.apply(jv), jv)) <= 1e-10);
      }
    }
  CHECK_THROWS_AS(complex_tangent_frame(catalog("ball", {1}), Vec{1, 0, 0}),
                  DimensionError);
}

TEST_CASE("level sets of the ball") {
  const ImplicitDomain ball = catalog("ball", {1, 4});
  const auto rep = level_set_levi_check(ball, {-0.05, -0.1}, sample_boundary(ball, 40, 2));
  CHECK(rep.boundary_min == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(rep.pseudoconvex);
  CHECK(rep.degenerate.empty());
  CHECK(rep.hypothesis_holds);
  for (const auto &row : rep.rows) {
    // sphere of radius 1 + t
    CHECK(row.min_levi == doctest::Approx(2.0 / (1.0 + row.t)).epsilon(1e-5));
    CHECK(row.min_slack >= -1e-8);
  }
  CHECK_THROWS_AS(level_set_levi_check(ball, {0.1}, sample_boundary(ball, 5, 2)),
                  ConfigError);
  const ImplicitDomain b3 = catalog("ball", {1});
  CHECK_THROWS_AS(level_set_levi_check(b3, {-0.1}, sample_boundary(b3, 5, 2)),
                  DimensionError);
}

TEST_CASE("Levi-degenerate points with K != 0") {
  const ImplicitDomain h = catalog("hartogs_example", {});
  const auto rep = level_set_levi_check(h, {-0.05, -0.1}, sample_boundary(h, 100, 1));
  CHECK(rep.pseudoconvex);
  REQUIRE_FALSE(rep.degenerate.empty());
  for (const auto &d : rep.degenerate) {
    CHECK(std::abs(d.K + 4.0) <= 1e-3);
    const Vec &q = rep.samples[d.sample].point;
    CHECK(std::hypot(q[0], q[1]) <= 1e-3);
  }
  CHECK(rep.hypothesis_holds);
  for (const auto &row : rep.rows) {
    CHECK(row.min_levi > 0.0);
    CHECK(row.min_levi_degenerate > 0.0);
    // principal curvatures +-2 on the z-line transported to level t
    const double t = row.t;
    CHECK(std::abs(row.min_levi_degenerate - (-8.0 * t / (1.0 - 4.0 * t * t))) <= 1e-4);
    CHECK(row.min_slack >= -1e-8);
  }

  LeviOptions serial;
  serial.exec = Exec::serial;
  const auto again = level_set_levi_check(h, {-0.05, -0.1}, sample_boundary(h, 100, 1), serial);
  CHECK(to_json(again).dump() == to_json(rep).dump());
}

TEST_CASE("Levi-degenerate points with K = 0") {
  const ImplicitDomain egg = catalog("complex_egg", {2});
  const auto rep = level_set_levi_check(egg, {-0.05, -0.1}, sample_boundary(egg, 100, 1));
  REQUIRE_FALSE(rep.degenerate.empty());
  for (const auto &d : rep.degenerate)
    CHECK(std::abs(d.K) <= 1e-6);
  CHECK_FALSE(rep.hypothesis_holds);
  for (const auto &row : rep.rows) {
    CHECK(std::abs(row.min_levi_degenerate) <= 1e-6);
    CHECK(row.min_slack >= -1e-8);
  }

  // without the search the samples miss the degenerate circle z = 0
  LeviOptions plain;
  plain.refine = false;
  const auto raw = level_set_levi_check(egg, {-0.05}, sample_boundary(egg, 100, 1), plain);
  CHECK(raw.degenerate.empty());
  CHECK(raw.boundary_min > 0.0);
}
