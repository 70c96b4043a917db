#include "pconvex/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pconvex/error.hpp"

namespace pconvex {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

Vec add(std::span<const double> a, std::span<const double> b) {
  Vec r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += b[i];
  return r;
}

Vec sub(std::span<const double> a, std::span<const double> b) {
  Vec r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] -= b[i];
  return r;
}

Vec scaled(std::span<const double> a, double s) {
  Vec r(a.begin(), a.end());
  for (auto &x : r)
    x *= s;
  return r;
}

Vec axpy(std::span<const double> a, double s, std::span<const double> b) {
  Vec r(a.begin(), a.end());
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += s * b[i];
  return r;
}

Vec unit_vector(std::size_t n, std::size_t i) {
  Vec e(n, 0.0);
  e[i] = 1.0;
  return e;
}

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

SymMatrix::SymMatrix(std::size_t n, std::span<const double> row_major)
    : n_(n), a_(n * n, 0.0) {
  if (row_major.size() != n * n)
    throw DimensionError("expected " + std::to_string(n * n) + " entries, got " +
                         std::to_string(row_major.size()));
  for (std::size_t i = 0; i < n; ++i) {
    a_[i * n + i] = row_major[i * n + i];
    for (std::size_t j = i + 1; j < n; ++j)
      set(i, j, 0.5 * (row_major[i * n + j] + row_major[j * n + i]));
  }
}

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    m.a_[i * n + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> d) {
  SymMatrix m(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    m.a_[i * d.size() + i] = d[i];
  return m;
}

SymMatrix SymMatrix::sym_outer(std::span<const double> u,
                               std::span<const double> v, double s) {
  const std::size_t n = u.size();
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      m.set(i, j, s * (u[i] * v[j] + v[i] * u[j]));
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> u, double s) {
  const std::size_t n = u.size();
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      m.set(i, j, s * u[i] * u[j]);
  return m;
}

void SymMatrix::add_to(std::size_t i, std::size_t j, double v) {
  a_[i * n_ + j] += v;
  if (i != j)
    a_[j * n_ + i] += v;
}

Vec SymMatrix::apply(std::span<const double> v) const {
  Vec r(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      s += a_[i * n_ + j] * v[j];
    r[i] = s;
  }
  return r;
}

double SymMatrix::form(std::span<const double> u,
                       std::span<const double> v) const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < n_; ++j)
      row += a_[i * n_ + j] * v[j];
    s += u[i] * row;
  }
  return s;
}

double SymMatrix::trace() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    s += a_[i * n_ + i];
  return s;
}

double SymMatrix::frobenius_norm() const { return norm(a_); }

bool SymMatrix::all_finite() const {
  return std::all_of(a_.begin(), a_.end(),
                     [](double x) { return std::isfinite(x); });
}

SymMatrix &SymMatrix::operator+=(const SymMatrix &o) {
  if (o.n_ != n_)
    throw DimensionError("matrix sum of dimensions " + std::to_string(n_) +
                         " and " + std::to_string(o.n_));
  for (std::size_t i = 0; i < a_.size(); ++i)
    a_[i] += o.a_[i];
  return *this;
}

SymMatrix &SymMatrix::operator*=(double s) {
  for (auto &x : a_)
    x *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi

namespace {

constexpr int kMaxSweeps = 100;
constexpr double kJacobiRelTol = 1e-13;

double off_diagonal_norm(const Vec &a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        s += a[i * n + j] * a[i * n + j];
  return std::sqrt(s);
}

} // namespace

Spectrum eigh(const SymMatrix &q) {
  if (!q.all_finite())
    throw InvalidMatrix("non-finite entry");
  const std::size_t n = q.dim();
  Vec a(q.data().begin(), q.data().end());
  Vec v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    v[i * n + i] = 1.0;

  const double threshold = kJacobiRelTol * q.frobenius_norm();
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (off_diagonal_norm(a, n) <= threshold)
      break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t r = p + 1; r < n; ++r) {
        const double apr = a[p * n + r];
        if (apr == 0.0)
          continue;
        const double theta = (a[r * n + r] - a[p * n + p]) / (2.0 * apr);
        double t;
        if (std::abs(theta) > 1e150)
          t = 0.5 / theta;
        else
          t = (theta >= 0.0 ? 1.0 : -1.0) /
              (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k * n + p];
          const double akr = a[k * n + r];
          a[k * n + p] = c * akp - s * akr;
          a[k * n + r] = s * akp + c * akr;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k];
          const double ark = a[r * n + k];
          a[p * n + k] = c * apk - s * ark;
          a[r * n + k] = s * apk + c * ark;
        }
        a[p * n + r] = 0.0;
        a[r * n + p] = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkr = v[k * n + r];
          v[k * n + p] = c * vkp - s * vkr;
          v[k * n + r] = s * vkp + c * vkr;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a[i * n + i] < a[j * n + j];
  });

  Spectrum out;
  out.eigenvalues.resize(n);
  out.eigenvectors.assign(n, Vec(n, 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t col = order[k];
    out.eigenvalues[k] = a[col * n + col];
    Vec &e = out.eigenvectors[k];
    std::size_t big = 0;
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = v[i * n + col];
      if (std::abs(e[i]) > std::abs(e[big]))
        big = i;
    }
    if (e[big] < 0.0)
      for (auto &x : e)
        x = -x;
  }
  return out;
}

Vec eigenvalues(const SymMatrix &q) { return eigh(q).eigenvalues; }

// ---------------------------------------------------------------------------
// Frames

Frame::Frame(std::size_t n, std::vector<Vec> vectors, double tol)
    : n_(n), v_(std::move(vectors)) {
  for (std::size_t i = 0; i < v_.size(); ++i) {
    if (v_[i].size() != n)
      throw DimensionError("frame vector of length " +
                           std::to_string(v_[i].size()) + " in R^" +
                           std::to_string(n));
    for (std::size_t j = 0; j <= i; ++j) {
      const double expect = i == j ? 1.0 : 0.0;
      if (std::abs(dot(v_[i], v_[j]) - expect) > tol)
        throw FrameError("vectors are not orthonormal");
    }
  }
}

SymMatrix Frame::projector() const {
  SymMatrix p(n_);
  for (const auto &v : v_)
    p += SymMatrix::outer(v);
  return p;
}

namespace {

// One Gram-Schmidt step of `w` against `basis`, done twice.
void orthogonalize_against(Vec &w, const std::vector<Vec> &basis) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto &b : basis) {
      const double c = dot(w, b);
      for (std::size_t i = 0; i < w.size(); ++i)
        w[i] -= c * b[i];
    }
}

} // namespace

Frame orthonormalize(const std::vector<Vec> &vectors) {
  if (vectors.empty())
    throw RankError("no vectors");
  const std::size_t n = vectors.front().size();
  std::vector<Vec> basis;
  basis.reserve(vectors.size());
  for (const auto &v : vectors) {
    if (v.size() != n)
      throw DimensionError("mixed vector lengths");
    const double scale = std::max(1.0, norm(v));
    Vec w = v;
    orthogonalize_against(w, basis);
    const double len = norm(w);
    if (!(len > kRankPivot * scale))
      throw RankError("numerical rank below " + std::to_string(vectors.size()));
    for (auto &x : w)
      x /= len;
    basis.push_back(std::move(w));
  }
  return Frame(n, std::move(basis));
}

Frame orthogonal_complement(std::size_t n, const std::vector<Vec> &vectors) {
  std::vector<Vec> basis;
  if (!vectors.empty())
    basis = orthonormalize(vectors).vectors();
  const std::size_t given = basis.size();
  // Candidates: standard basis vectors, most orthogonal first.
  std::vector<std::pair<double, std::size_t>> cand;
  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    for (const auto &b : basis)
      w += b[i] * b[i];
    cand.emplace_back(w, i);
  }
  std::stable_sort(cand.begin(), cand.end());
  std::vector<Vec> out;
  for (const auto &[weight, i] : cand) {
    if (basis.size() == n)
      break;
    Vec w = unit_vector(n, i);
    orthogonalize_against(w, basis);
    const double len = norm(w);
    if (len < 1e-6)
      continue;
    for (auto &x : w)
      x /= len;
    basis.push_back(w);
    out.push_back(std::move(w));
  }
  if (out.size() + given != n)
    throw RankError("could not complete the basis");
  return Frame(n, std::move(out));
}

double trace_on_plane(const SymMatrix &q, const Frame &plane) {
  if (plane.ambient_dim() != q.dim())
    throw DimensionError("frame in R^" + std::to_string(plane.ambient_dim()) +
                         " vs matrix of size " + std::to_string(q.dim()));
  double s = 0.0;
  for (const auto &v : plane.vectors())
    s += q.form(v, v);
  return s;
}

double min_trace_p(const Spectrum &s, std::size_t p) {
  if (p < 1 || p > s.eigenvalues.size())
    throw InvalidP("p = " + std::to_string(p) + " outside [1, " +
                   std::to_string(s.eigenvalues.size()) + "]");
  double sum = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    sum += s.eigenvalues[i];
  return sum;
}

double min_trace_p(const SymMatrix &q, std::size_t p) {
  if (p < 1 || p > q.dim())
    throw InvalidP("p = " + std::to_string(p) + " outside [1, " +
                   std::to_string(q.dim()) + "]");
  return min_trace_p(eigh(q), p);
}

Frame eigen_frame(const Spectrum &s, std::size_t p) {
  if (p < 1 || p > s.eigenvalues.size())
    throw InvalidP("p = " + std::to_string(p));
  return Frame(s.eigenvalues.size(),
               std::vector<Vec>(s.eigenvectors.begin(),
                                s.eigenvectors.begin() +
                                    static_cast<std::ptrdiff_t>(p)),
               1e-10);
}

SymMatrix restrict_to(const SymMatrix &q, const Frame &plane) {
  if (plane.ambient_dim() != q.dim())
    throw DimensionError("frame/matrix dimension mismatch");
  const std::size_t p = plane.plane_dim();
  std::vector<Vec> qv;
  qv.reserve(p);
  for (const auto &v : plane.vectors())
    qv.push_back(q.apply(v));
  SymMatrix r(p);
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = i; j < p; ++j)
      r.set(i, j, 0.5 * (dot(plane[i], qv[j]) + dot(plane[j], qv[i])));
  return r;
}

Frame random_frame(std::size_t n, std::size_t p, Rng &rng) {
  if (p < 1 || p >= n)
    throw InvalidP("random frame needs 1 <= p < n, got p = " +
                   std::to_string(p) + ", n = " + std::to_string(n));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (;;) {
    std::vector<Vec> draws(p, Vec(n));
    for (auto &v : draws)
      for (auto &x : v)
        x = gauss(rng);
    try {
      return orthonormalize(draws);
    } catch (const RankError &) {
      // degenerate draw, try again
    }
  }
}

Frame random_frame(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  return random_frame(n, p, rng);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

Vec solve_dense(std::vector<double> a, Vec b, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k]))
        piv = i;
    if (!(std::abs(a[piv * n + k]) > 0.0))
      throw InvalidMatrix("singular system");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a[k * n + j], a[piv * n + j]);
      std::swap(b[k], b[piv]);
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i * n + k] / a[k * n + k];
      if (f == 0.0)
        continue;
      for (std::size_t j = k; j < n; ++j)
        a[i * n + j] -= f * a[k * n + j];
      b[i] -= f * b[k];
    }
  }
  Vec x(n, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j)
      s -= a[i * n + j] * x[j];
    x[i] = s / a[i * n + i];
  }
  return x;
}

} // namespace pconvex
