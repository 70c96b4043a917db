#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>

#include "pconvex/linalg.hpp"

namespace pconvex {

/// Value, gradient and Hessian of a function at a point. `order` tells how
/// much of it was filled in: 0 value only, 1 adds the gradient, 2 adds the
/// Hessian.
struct Jet {
  double value = 0.0;
  Vec gradient;
  SymMatrix hessian;
  int order = 0;
};

enum class DerivativeMode { analytic, finite_difference };

/// A smooth function R^n -> R. Immutable and cheap to copy; the evaluator is
/// shared. Evaluators must be reentrant.
class ScalarField {
public:
  using Evaluator = std::function<Jet(std::span<const double>, int order)>;

  ScalarField() = default;
  ScalarField(std::size_t n, Evaluator eval,
              DerivativeMode mode = DerivativeMode::analytic,
              double h_fd = 0.0);

  // Field given by its value only; derivatives by central differences with
  // step h_fd, or the default step when h_fd <= 0.
  static ScalarField from_values(std::size_t n,
                                 std::function<double(std::span<const double>)> f,
                                 double h_fd = 0.0);

  std::size_t dim() const { return n_; }
  DerivativeMode mode() const { return mode_; }
  double fd_step() const { return h_fd_; }
  explicit operator bool() const { return static_cast<bool>(eval_); }

  // Throws EvaluationError on non-finite output.
  Jet jet(std::span<const double> x, int order = 2) const;
  double value(std::span<const double> x) const { return jet(x, 0).value; }
  Vec gradient(std::span<const double> x) const { return jet(x, 1).gradient; }
  SymMatrix hessian(std::span<const double> x) const {
    return jet(x, 2).hessian;
  }

private:
  std::size_t n_ = 0;
  std::shared_ptr<const Evaluator> eval_;
  DerivativeMode mode_ = DerivativeMode::analytic;
  double h_fd_ = 0.0;
};

// 1e-4 * (1 + |x|)
double default_fd_step(std::span<const double> x);

// Central differences of values. h_fd <= 0 selects default_fd_step(x).
Vec fd_gradient(const ScalarField &f, std::span<const double> x,
                double h_fd = 0.0);
SymMatrix fd_hessian(const ScalarField &f, std::span<const double> x,
                     double h_fd = 0.0);

// Central differences of the gradient, symmetrized. Much less sensitive to
// rounding than second differences of values when the gradient is accurate.
// order 2 uses x +- h, order 4 the five-point stencil x +- h, x +- 2h.
SymMatrix fd_hessian_of_gradient(
    const std::function<Vec(std::span<const double>)> &grad,
    std::span<const double> x, double h_fd = 0.0, int order = 2);

} // namespace pconvex
