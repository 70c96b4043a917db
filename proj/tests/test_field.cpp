#include <doctest.h>

#include <cmath>

#include "pconvex/domain.hpp"
#include "pconvex/error.hpp"
#include "pconvex/expr.hpp"

using namespace pconvex;

namespace {

std::vector<ImplicitDomain> all_catalog() {
  return {catalog("ball", {1}),
          catalog("ball", {1.5, 4}),
          catalog("ellipsoid", {1, 2, 3}),
          catalog("solid_torus", {2.5, 1}),
          catalog("perturbed_ball", {1, 0.3, 3}),
          catalog("complex_egg", {2}),
          catalog("complex_egg", {1}),
          catalog("hartogs_example", {})};
}

Vec random_point(const Box &b, Rng &rng) {
  Vec x;
  for (const auto &[lo, hi] : b.ranges)
    x.push_back(std::uniform_real_distribution<double>(lo, hi)(rng));
  return x;
}

} // namespace

TEST_CASE("fd_gradient") {
  const ScalarField sq = parse_field("x1^2 + x2^2", 2);
  const Vec g = fd_gradient(sq, Vec{1, 2});
  CHECK(std::abs(g[0] - 2.0) <= 1e-9);
  CHECK(std::abs(g[1] - 4.0) <= 1e-9);

  const Vec z = fd_gradient(parse_field("3.5", 2), Vec{0.3, -1});
  CHECK(z == Vec{0, 0});

  const ScalarField sc = parse_field("sin(x1)*cos(x2)", 2);
  const Vec gs = fd_gradient(sc, Vec{0.3, 0.7}, 1e-4);
  CHECK(std::abs(gs[0] - std::cos(0.3) * std::cos(0.7)) <= 1e-7);
  CHECK(std::abs(gs[1] + std::sin(0.3) * std::sin(0.7)) <= 1e-7);
}

TEST_CASE("fd_hessian") {
  const SymMatrix h = fd_hessian(parse_field("r2", 3), Vec{0.2, -0.4, 1.1});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(h(i, j) - (i == j ? 2.0 : 0.0)) <= 1e-6);

  const SymMatrix l = fd_hessian(parse_field("2*x1 - x2 + 0.5*x3", 3), Vec{1, 1, 1});
  CHECK(l.frobenius_norm() <= 1e-6);

  // d2/dx1^2 x1^2 x2 = 2 x2, d2/dx1dx2 = 2 x1, d2/dx2^2 = 0
  const SymMatrix c = fd_hessian(parse_field("x1^2*x2", 2), Vec{1, 1});
  CHECK(std::abs(c(0, 0) - 2.0) <= 1e-5);
  CHECK(std::abs(c(0, 1) - 2.0) <= 1e-5);
  CHECK(std::abs(c(1, 1)) <= 1e-5);
  CHECK(c(0, 1) == c(1, 0));
}

TEST_CASE("fd_hessian_of_gradient orders") {
  // f = sin(x1) exp(x2)
  auto grad = [](std::span<const double> x) {
    return Vec{std::cos(x[0]) * std::exp(x[1]), std::sin(x[0]) * std::exp(x[1])};
  };
  const Vec x = {0.7, -0.3};
  const double s = std::sin(x[0]) * std::exp(x[1]), c = std::cos(x[0]) * std::exp(x[1]);
  const double exact[2][2] = {{-s, c}, {c, s}};
  auto err = [&](const SymMatrix &h) {
    double e = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      for (std::size_t j = 0; j < 2; ++j)
        e = std::max(e, std::abs(h(i, j) - exact[i][j]));
    return e;
  };
  const double e2 = err(fd_hessian_of_gradient(grad, x, 1e-2, 2));
  const double e4 = err(fd_hessian_of_gradient(grad, x, 1e-2, 4));
  CHECK(e2 > 1e-6);
  CHECK(e4 <= 1e-8);
  CHECK(e4 < e2 * 1e-3);
  CHECK_THROWS_AS(fd_hessian_of_gradient(grad, x, 1e-2, 3), ConfigError);
}

TEST_CASE("fd derivatives surface non-finite evaluations") {
  const ScalarField f = ScalarField::from_values(
      2, [](std::span<const double> x) { return x[0] > 0 ? std::log(-1.0) : 0.0; });
  CHECK_THROWS_AS(fd_gradient(f, Vec{0.0, 0.0}), EvaluationError);
  CHECK_THROWS_AS(f.value(Vec{1.0, 0.0}), EvaluationError);
}

TEST_CASE("expression parsing") {
  const Expression e = Expression::parse("-x1^2 + 2*x2 - x3/4", 3);
  CHECK(e.value(Vec{3, 1, 2}) == doctest::Approx(-9 + 2 - 0.5));
  CHECK(Expression::parse("2**3**2", 1).value(Vec{0}) == doctest::Approx(512));
  CHECK(Expression::parse("|x|", 2).value(Vec{3, 4}) == doctest::Approx(5));
  CHECK(Expression::parse("r2 - pi + e", 2).value(Vec{1, 1}) ==
        doctest::Approx(2 - M_PI + M_E));
  CHECK(Expression::parse("sqrt(exp(log(4)))", 1).value(Vec{0}) == doctest::Approx(2));
  CHECK(Expression::parse("x1·x2", 2).value(Vec{2, 3}) == doctest::Approx(6));

  CHECK_THROWS_AS(Expression::parse("x1 +", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("x3", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("foo(x1)", 2), ParseError);
  CHECK_THROWS_AS(Expression::parse("(x1", 2), ParseError);
  try {
    Expression::parse("x1 + $", 1);
    FAIL("expected ParseError");
  } catch (const ParseError &err) {
    CHECK(std::string(err.what()).find("column 6") != std::string::npos);
  }
}

TEST_CASE("expression derivatives agree with finite differences") {
  const char *texts[] = {"sin(x1)*cos(x2) + x3^3",
                         "exp(x1*x2) / (2 + x3^2)",
                         "sqrt(1 + r2) - log(2 + x1)",
                         "|x| * x2 + x1^x3",
                         "(x1 - 0.5)^2 * (x2 + 1)^3 - 2^x3"};
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.2, 0.9);
  for (const char *t : texts) {
    const ScalarField f = parse_field(t, 3);
    for (int k = 0; k < 20; ++k) {
      const Vec x = {u(rng), u(rng), u(rng)};
      const Jet j = f.jet(x, 2);
      const Vec g = fd_gradient(f, x);
      const SymMatrix h = fd_hessian(f, x);
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(g[i] - j.gradient[i]) <= 1e-6 * (1 + norm(j.gradient)));
        for (std::size_t l = 0; l < 3; ++l)
          CHECK(std::abs(h(i, l) - j.hessian(i, l)) <= 1e-5 * (1 + j.hessian.frobenius_norm()));
      }
    }
  }
}

TEST_CASE("catalog examples") {
  CHECK(catalog("ball", {1}).rho0().value(Vec{0.5, 0, 0}) == doctest::Approx(-0.75));
  CHECK(catalog("solid_torus", {2.5, 1}).rho0().value(Vec{2.5, 0, 0}) ==
        doctest::Approx(-1.0));
  const Vec g = catalog("ellipsoid", {1, 2, 3}).rho0().gradient(Vec{1, 0, 0});
  CHECK(g == Vec{2, 0, 0});
  CHECK(catalog("complex_egg", {2}).dim() == 4);
  CHECK(catalog("ball", {2, 5}).dim() == 5);

  CHECK_THROWS_AS(catalog("ball", {-1}), CatalogError);
  CHECK_THROWS_AS(catalog("ellipsoid", {1, 0, 2}), CatalogError);
  CHECK_THROWS_AS(catalog("solid_torus", {1, 1}), CatalogError);
  CHECK_THROWS_AS(catalog("solid_torus", {1, 2}), CatalogError);
  CHECK_THROWS_AS(catalog("complex_egg", {1.5}), CatalogError);
  CHECK_THROWS_AS(catalog("hartogs_example", {0.3}), CatalogError);
  CHECK_THROWS_AS(catalog("klein_bottle", {}), CatalogError);
}

TEST_CASE("catalog analytic derivatives agree with finite differences") {
  Rng rng(5);
  for (const ImplicitDomain &d : all_catalog()) {
    CAPTURE(d.name());
    for (int k = 0; k < 100; ++k) {
      const Vec x = random_point(d.bbox(), rng);
      const Jet j = d.rho0().jet(x, 2);
      const Vec g = fd_gradient(d.rho0(), x);
      const SymMatrix h = fd_hessian(d.rho0(), x);
      for (std::size_t i = 0; i < x.size(); ++i) {
        CHECK(std::abs(g[i] - j.gradient[i]) <= 1e-6 * (1 + norm(j.gradient)));
        for (std::size_t l = 0; l < x.size(); ++l) {
          CHECK(std::abs(h(i, l) - j.hessian(i, l)) <= 1e-5 * (1 + j.hessian.frobenius_norm()));
          CHECK(j.hessian(i, l) == j.hessian(l, i));
        }
      }
    }
  }
}

TEST_CASE("catalog domains are bounded by their boxes") {
  Rng rng(6);
  for (const ImplicitDomain &d : all_catalog()) {
    CAPTURE(d.name());
    const Box &b = d.bbox();
    for (std::size_t axis = 0; axis < b.dim(); ++axis) {
      for (int side = 0; side < 2; ++side) {
        for (int k = 0; k < 200; ++k) {
          Vec x = random_point(b, rng);
          x[axis] = side ? b.ranges[axis].second : b.ranges[axis].first;
          CHECK(d.rho0().value(x) > 0.0);
        }
      }
    }
  }
}

TEST_CASE("domain specs round-trip through JSON") {
  const DomainSpec s = parse_domain_argument(
      R"({"name": "blob", "dim": 3, "expr": "x1^2 + 2*x2^2 + x3^4 - 1",
          "bbox": [[-1.2, 1.2], [-1, 1], [-1.2, 1.2]]})");
  const ImplicitDomain d = make_domain(s);
  CHECK(d.name() == "blob");
  CHECK(d.rho0().value(Vec{0, 0, 0}) == -1.0);
  const ImplicitDomain e = make_domain(domain_spec_from_json(to_json(d.spec())));
  CHECK(to_json(e.spec()) == to_json(d.spec()));

  const DomainSpec c = parse_domain_argument("catalog:solid_torus:2.5,1");
  CHECK(c.catalog_kind == "solid_torus");
  CHECK(c.catalog_params == Vec{2.5, 1});

  const DomainSpec named = parse_domain_argument(
      R"({"catalog": {"kind": "solid_torus", "params": {"R_ring": 2.5, "r_tube": 1}}})");
  CHECK(named.catalog_params == Vec{2.5, 1});
  const DomainSpec axes = parse_domain_argument(
      R"({"catalog": {"kind": "ellipsoid", "params": {"axes": [1, 2, 3]}}})");
  CHECK(make_domain(axes).dim() == 3);

  CHECK_THROWS_AS(parse_domain_argument("catalog:ball:x"), ConfigError);
  CHECK_THROWS_AS(parse_domain_argument("{not json"), ConfigError);
  CHECK_THROWS_AS(parse_domain_argument("/nonexistent/domain.json"), ConfigError);
  CHECK_THROWS_AS(make_domain(parse_domain_argument(R"({"dim": 2, "expr": "r2 - 1"})")),
                  ConfigError);
}
