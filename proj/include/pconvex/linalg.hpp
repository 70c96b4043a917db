#pragma once

// Small dense linear algebra for the Hessians handled by this library:
// symmetric matrices, eigen-decomposition by cyclic Jacobi rotations,
// orthonormal frames of p-planes and restricted traces over them.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace pconvex {

using Vec = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);
Vec add(std::span<const double> a, std::span<const double> b);
Vec sub(std::span<const double> a, std::span<const double> b);
Vec scaled(std::span<const double> a, double s);
// a + s * b
Vec axpy(std::span<const double> a, double s, std::span<const double> b);
Vec unit_vector(std::size_t n, std::size_t i);

/// Real symmetric n x n matrix stored row-major. Symmetry is exact: the
/// constructor averages (i,j) and (j,i), and set() writes both entries.
class SymMatrix {
public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n);
  SymMatrix(std::size_t n, std::span<const double> row_major);

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> d);
  // u v^T + v u^T, scaled by s
  static SymMatrix sym_outer(std::span<const double> u,
                             std::span<const double> v, double s = 1.0);
  // s * u u^T
  static SymMatrix outer(std::span<const double> u, double s = 1.0);

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }
  void set(std::size_t i, std::size_t j, double v) {
    a_[i * n_ + j] = v;
    a_[j * n_ + i] = v;
  }
  void add_to(std::size_t i, std::size_t j, double v);

  std::span<const double> data() const { return a_; }

  Vec apply(std::span<const double> v) const;
  // u^T Q v
  double form(std::span<const double> u, std::span<const double> v) const;
  double trace() const;
  double frobenius_norm() const;
  bool all_finite() const;

  SymMatrix &operator+=(const SymMatrix &o);
  SymMatrix &operator*=(double s);
  friend SymMatrix operator+(SymMatrix a, const SymMatrix &b) {
    return a += b;
  }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

private:
  std::size_t n_ = 0;
  Vec a_;
};

/// Eigenvalues sorted ascending with matching orthonormal eigenvectors.
struct Spectrum {
  Vec eigenvalues;
  std::vector<Vec> eigenvectors;
};

Spectrum eigh(const SymMatrix &q);
Vec eigenvalues(const SymMatrix &q);

/// Orthonormal basis of a p-plane in R^n.
class Frame {
public:
  Frame() = default;
  // Throws FrameError unless the vectors are orthonormal within tol.
  Frame(std::size_t n, std::vector<Vec> vectors, double tol = 1e-12);

  std::size_t ambient_dim() const { return n_; }
  std::size_t plane_dim() const { return v_.size(); }
  const std::vector<Vec> &vectors() const { return v_; }
  const Vec &operator[](std::size_t i) const { return v_[i]; }
  // Orthogonal projector onto the plane.
  SymMatrix projector() const;

private:
  std::size_t n_ = 0;
  std::vector<Vec> v_;
};

inline constexpr double kFrameTol = 1e-12;
inline constexpr double kRankPivot = 1e-10;

// Modified Gram-Schmidt with one re-orthogonalization pass. Throws RankError
// when a residual falls below kRankPivot relative to the input vector.
Frame orthonormalize(const std::vector<Vec> &vectors);

// Orthonormal basis of the orthogonal complement of span(vectors) in R^n.
Frame orthogonal_complement(std::size_t n, const std::vector<Vec> &vectors);

double trace_on_plane(const SymMatrix &q, const Frame &plane);

// Sum of the p smallest eigenvalues; 1 <= p <= n.
double min_trace_p(const SymMatrix &q, std::size_t p);
double min_trace_p(const Spectrum &s, std::size_t p);

// Frame spanned by the eigenvectors of the p smallest eigenvalues.
Frame eigen_frame(const Spectrum &s, std::size_t p);

// Q restricted to a plane, expressed in the plane's basis (p x p).
SymMatrix restrict_to(const SymMatrix &q, const Frame &plane);

using Rng = std::mt19937_64;

Frame random_frame(std::size_t n, std::size_t p, Rng &rng);
Frame random_frame(std::size_t n, std::size_t p, std::uint64_t seed);

// Deterministic seed for stream `index` derived from a base seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

// Dense solve with partial pivoting. Throws InvalidMatrix when singular.
Vec solve_dense(std::vector<double> a, Vec b, std::size_t n);

} // namespace pconvex
