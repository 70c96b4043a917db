#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pconvex/error.hpp"
#include "pconvex/grassmann.hpp"
#include "pconvex/linalg.hpp"

using namespace pconvex;

namespace {

SymMatrix random_sym(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> a(n * n);
  for (double &v : a)
    v = g(rng);
  return SymMatrix(n, a);
}

double residual(const SymMatrix &q, const Spectrum &s) {
  double r = 0.0;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    const Vec qv = q.apply(s.eigenvectors[i]);
    const Vec d = axpy(qv, -s.eigenvalues[i], s.eigenvectors[i]);
    r += dot(d, d);
  }
  return std::sqrt(r);
}

} // namespace

TEST_CASE("SymMatrix is exactly symmetric after construction") {
  const std::vector<double> a = {1, 2, 3, 4, 5, 6, 7, 8, 9};
  const SymMatrix q(3, a);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(q(i, j) == q(j, i));
  CHECK(q(0, 1) == 3.0);
}

TEST_CASE("eigh on simple matrices") {
  const Vec d = {3, 1, 2};
  const Spectrum s = eigh(SymMatrix::diagonal(d));
  CHECK(s.eigenvalues == Vec{1, 2, 3});
  CHECK(s.eigenvectors[0] == Vec{0, 1, 0});

  const Spectrum id = eigh(SymMatrix::identity(4));
  for (double l : id.eigenvalues)
    CHECK(l == doctest::Approx(1.0).epsilon(1e-15));
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(dot(id.eigenvectors[i], id.eigenvectors[j]) ==
            doctest::Approx(i == j ? 1.0 : 0.0));
}

TEST_CASE("eigh matches the closed form for 2x2") {
  // [[a, b], [b, c]]: (a + c)/2 -+ sqrt(((a - c)/2)^2 + b^2)
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SymMatrix q = random_sym(2, seed);
    const double m = 0.5 * (q(0, 0) + q(1, 1));
    const double r = std::hypot(0.5 * (q(0, 0) - q(1, 1)), q(0, 1));
    const Vec l = eigenvalues(q);
    CHECK(l[0] == doctest::Approx(m - r).epsilon(1e-13));
    CHECK(l[1] == doctest::Approx(m + r).epsilon(1e-13));
  }
}

TEST_CASE("eigh reconstruction residual") {
  const SymMatrix q = random_sym(6, 42);
  CHECK(residual(q, eigh(q)) <= 1e-10 * q.frobenius_norm());

  for (std::size_t n = 2; n <= 12; ++n) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SymMatrix m = random_sym(n, 1000 * n + seed);
      const Spectrum s = eigh(m);
      CHECK(residual(m, s) <= 1e-10 * std::max(1.0, m.frobenius_norm()));
      for (std::size_t i = 1; i < n; ++i)
        CHECK(s.eigenvalues[i - 1] <= s.eigenvalues[i]);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          CHECK(std::abs(dot(s.eigenvectors[i], s.eigenvectors[j]) -
                         (i == j ? 1.0 : 0.0)) <= 1e-12);
      // trace and Frobenius norm are spectral invariants
      const double tr = std::accumulate(s.eigenvalues.begin(), s.eigenvalues.end(), 0.0);
      CHECK(tr == doctest::Approx(m.trace()).epsilon(1e-12));
      double sq = 0.0;
      for (double l : s.eigenvalues)
        sq += l * l;
      CHECK(std::sqrt(sq) == doctest::Approx(m.frobenius_norm()).epsilon(1e-12));
    }
  }
}

TEST_CASE("eigh is deterministic and sign-normalized") {
  const SymMatrix q = random_sym(7, 3);
  const Spectrum a = eigh(q), b = eigh(q);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
  for (const Vec &v : a.eigenvectors) {
    std::size_t big = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (std::abs(v[i]) > std::abs(v[big]))
        big = i;
    CHECK(v[big] > 0.0);
  }
}

TEST_CASE("eigh rejects non-finite entries") {
  SymMatrix q(3);
  q.set(0, 1, std::nan(""));
  CHECK_THROWS_AS(eigh(q), InvalidMatrix);
}

TEST_CASE("trace_on_plane") {
  const SymMatrix q = SymMatrix::diagonal(Vec{-1, 2, 3});
  CHECK(trace_on_plane(q, Frame(3, {{1, 0, 0}, {0, 1, 0}})) == doctest::Approx(1.0));
  const double s = 1.0 / std::sqrt(2.0);
  // v = (e1 + e2)/sqrt2 gives (-1 + 2)/2, w = e3 gives 3
  const double oracle = 0.5 * (-1.0 + 2.0) + 3.0;
  CHECK(trace_on_plane(q, Frame(3, {{s, s, 0}, {0, 0, 1}})) ==
        doctest::Approx(oracle).epsilon(1e-14));
  CHECK(oracle == 3.5);

  const SymMatrix id = SymMatrix::identity(5);
  CHECK(trace_on_plane(id, random_frame(5, 2, 11)) == doctest::Approx(2.0));

  CHECK_THROWS_AS(trace_on_plane(id, Frame(3, {{1, 0, 0}})), DimensionError);
}

TEST_CASE("trace_on_plane is basis independent") {
  const SymMatrix q = random_sym(6, 5);
  Rng rng(9);
  std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
  for (int k = 0; k < 50; ++k) {
    const Frame f = random_frame(6, 2, rng);
    const double th = ang(rng);
    const Vec a = axpy(scaled(f[0], std::cos(th)), std::sin(th), f[1]);
    const Vec b = axpy(scaled(f[0], -std::sin(th)), std::cos(th), f[1]);
    CHECK(std::abs(trace_on_plane(q, f) - trace_on_plane(q, Frame(6, {a, b}, 1e-12))) <= 1e-10);
  }
}

TEST_CASE("min_trace_p") {
  const SymMatrix q = SymMatrix::diagonal(Vec{-1, 2, 3});
  CHECK(min_trace_p(q, 2) == 1.0);
  CHECK(min_trace_p(SymMatrix(4), 2) == 0.0);
  CHECK_THROWS_AS(min_trace_p(q, 0), InvalidP);
  CHECK_THROWS_AS(min_trace_p(q, 4), InvalidP);

  for (std::size_t n = 2; n <= 8; ++n) {
    const SymMatrix m = random_sym(n, 77 + n);
    CHECK(std::abs(min_trace_p(m, n) - m.trace()) <= 1e-12 * std::max(1.0, m.frobenius_norm()));
  }
}

TEST_CASE("min_trace_p lower-bounds every restricted trace and is attained") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const std::size_t n = 3 + seed % 5;
    const SymMatrix q = random_sym(n, seed);
    const Spectrum s = eigh(q);
    for (std::size_t p = 1; p < n; ++p) {
      const double m = min_trace_p(s, p);
      CHECK(std::abs(trace_on_plane(q, eigen_frame(s, p)) - m) <= 1e-10);
      Rng rng(derive_seed(seed, p));
      for (int k = 0; k < 200; ++k)
        CHECK(trace_on_plane(q, random_frame(n, p, rng)) >= m - 1e-10);
    }
  }
}

TEST_CASE("Grassmannian oracle brackets the formula from above") {
  const SymMatrix q = random_sym(5, 7);
  const double formula = min_trace_p(q, 3);
  const SampledMinTrace o = grassmannian_min_trace(q, 3, 100000, 7);
  CHECK(o.samples == 100000);
  CHECK(o.min_trace >= formula - 1e-12);
  // Uniform sampling of the 6-dimensional G(3,5) closes the gap only like
  // N^(-1/3); more samples must never widen it.
  const SampledMinTrace few = grassmannian_min_trace(q, 3, 1000, 7);
  CHECK(o.min_trace <= few.min_trace);
  CHECK(o.min_trace - formula <= 0.25);

  // A one-dimensional Grassmannian is covered densely enough for 5e-3.
  const SymMatrix q2 = random_sym(2, 7);
  const double f2 = min_trace_p(q2, 1);
  const SampledMinTrace o2 = grassmannian_min_trace(q2, 1, 100000, 7);
  CHECK(o2.min_trace >= f2 - 1e-12);
  CHECK(o2.min_trace <= f2 + 5e-3);
}

TEST_CASE("Grassmannian oracle: serial and OpenMP paths agree exactly") {
  const SymMatrix q = random_sym(6, 8);
  const auto a = grassmannian_min_trace_serial(q, 2, 5000, 3);
  const auto b = grassmannian_min_trace_omp(q, 2, 5000, 3);
  CHECK(a.min_trace == b.min_trace);
  CHECK(a.argmin == b.argmin);
}

TEST_CASE("random_frame") {
  const Frame f = random_frame(3, 2, 123);
  CHECK(std::abs(norm(f[0]) - 1.0) <= 1e-12);
  CHECK(std::abs(norm(f[1]) - 1.0) <= 1e-12);
  CHECK(std::abs(dot(f[0], f[1])) <= 1e-12);
  CHECK(std::abs(norm(random_frame(2, 1, 5)[0]) - 1.0) <= 1e-12);
  CHECK(random_frame(4, 2, 99).vectors() == random_frame(4, 2, 99).vectors());
  CHECK_THROWS_AS(random_frame(3, 3, 1), InvalidP);

  // uniform lines in R^3: E[v v^T] = I/3
  Rng rng(2024);
  SymMatrix mean(3);
  const int draws = 10000;
  for (int k = 0; k < draws; ++k)
    mean += SymMatrix::outer(random_frame(3, 1, rng)[0], 1.0 / draws);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(mean(i, j) - (i == j ? 1.0 / 3.0 : 0.0)) <= 0.05);
}

TEST_CASE("orthonormalize") {
  const Frame f = orthonormalize({{1, 0, 0}, {1, 1, 0}});
  CHECK(f[0] == Vec{1, 0, 0});
  CHECK(std::abs(f[1][1] - 1.0) <= 1e-15);
  CHECK(std::abs(f[1][0]) <= 1e-15);

  const Frame g = random_frame(5, 3, 4);
  const Frame h = orthonormalize(g.vectors());
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 5; ++k)
      CHECK(std::abs(g[i][k] - h[i][k]) <= 1e-14);

  // span{(1,1,0), (0,1,1)}: projector I - m m^T with unit normal m = (1,-1,1)/sqrt3
  const SymMatrix p = orthonormalize({{1, 1, 0}, {0, 1, 1}}).projector();
  const Vec m = scaled(Vec{1, -1, 1}, 1.0 / std::sqrt(3.0));
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      CHECK(std::abs(p(i, j) - ((i == j ? 1.0 : 0.0) - m[i] * m[j])) <= 1e-12);

  CHECK_THROWS_AS(orthonormalize({{1, 2, 3}, {2, 4, 6}}), RankError);
}

TEST_CASE("Frame rejects non-orthonormal input") {
  CHECK_THROWS_AS(Frame(3, {{1, 0, 0}, {1, 1e-6, 0}}), FrameError);
  CHECK_THROWS_AS(Frame(3, {{2, 0, 0}}), FrameError);
}

TEST_CASE("orthogonal_complement") {
  const Vec nrm = scaled(Vec{1, 2, 2}, 1.0 / 3.0);
  const Frame t = orthogonal_complement(3, {nrm});
  CHECK(t.plane_dim() == 2);
  for (const Vec &v : t.vectors())
    CHECK(std::abs(dot(v, nrm)) <= 1e-14);
}

TEST_CASE("solve_dense") {
  const Vec x = solve_dense({2, 1, 1, 3}, {3, 5}, 2);
  CHECK(x[0] == doctest::Approx(0.8));
  CHECK(x[1] == doctest::Approx(1.4));
  CHECK_THROWS_AS(solve_dense({1, 2, 2, 4}, {1, 1}, 2), InvalidMatrix);
}
