#include "pconvex/field.hpp"

#include <algorithm>
#include <cmath>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

double eval_value(const ScalarField &f, std::span<const double> x) {
  return f.jet(x, 0).value;
}

} // namespace

ScalarField::ScalarField(std::size_t n, Evaluator eval, DerivativeMode mode,
                         double h_fd)
    : n_(n), eval_(std::make_shared<const Evaluator>(std::move(eval))),
      mode_(mode), h_fd_(h_fd) {}

ScalarField ScalarField::from_values(
    std::size_t n, std::function<double(std::span<const double>)> f,
    double h_fd) {
  // The derivative closures need a field object for the value; build a value
  // only field first and capture it.
  ScalarField base(n, [f](std::span<const double> x, int) {
    Jet j;
    j.value = f(x);
    return j;
  });
  return ScalarField(
      n,
      [base, h_fd](std::span<const double> x, int order) {
        Jet j;
        j.value = base.value(x);
        if (order >= 1)
          j.gradient = fd_gradient(base, x, h_fd);
        if (order >= 2)
          j.hessian = fd_hessian(base, x, h_fd);
        j.order = order;
        return j;
      },
      DerivativeMode::finite_difference, h_fd);
}

Jet ScalarField::jet(std::span<const double> x, int order) const {
  if (!eval_)
    throw EvaluationError("empty field");
  if (x.size() != n_)
    throw DimensionError("point in R^" + std::to_string(x.size()) +
                         " for a field on R^" + std::to_string(n_));
  Jet j = (*eval_)(x, order);
  j.order = order;
  if (!std::isfinite(j.value))
    throw EvaluationError("non-finite value");
  if (order >= 1) {
    if (j.gradient.size() != n_)
      throw EvaluationError("evaluator returned no gradient");
    for (double g : j.gradient)
      if (!std::isfinite(g))
        throw EvaluationError("non-finite gradient");
  }
  if (order >= 2) {
    if (j.hessian.dim() != n_)
      throw EvaluationError("evaluator returned no Hessian");
    if (!j.hessian.all_finite())
      throw EvaluationError("non-finite Hessian");
  }
  return j;
}

double default_fd_step(std::span<const double> x) {
  return 1e-4 * (1.0 + norm(x));
}

Vec fd_gradient(const ScalarField &f, std::span<const double> x,
                double h_fd) {
  const double h = h_fd > 0.0 ? h_fd : default_fd_step(x);
  const std::size_t n = x.size();
  Vec g(n);
  Vec y(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x[i] + h;
    const double fp = eval_value(f, y);
    y[i] = x[i] - h;
    const double fm = eval_value(f, y);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

SymMatrix fd_hessian(const ScalarField &f, std::span<const double> x,
                     double h_fd) {
  const double h = h_fd > 0.0 ? h_fd : default_fd_step(x);
  const std::size_t n = x.size();
  SymMatrix hess(n);
  Vec y(x.begin(), x.end());
  const double f0 = eval_value(f, x);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = x[i] + h;
    const double fp = eval_value(f, y);
    y[i] = x[i] - h;
    const double fm = eval_value(f, y);
    y[i] = x[i];
    hess.set(i, i, (fp - 2.0 * f0 + fm) / (h * h));
    for (std::size_t j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          y[i] = x[i] + si * h;
          y[j] = x[j] + sj * h;
          acc += si * sj * eval_value(f, y);
        }
      y[i] = x[i];
      y[j] = x[j];
      hess.set(i, j, acc / (4.0 * h * h));
    }
  }
  return hess;
}

SymMatrix fd_hessian_of_gradient(
    const std::function<Vec(std::span<const double>)> &grad,
    std::span<const double> x, double h_fd, int order) {
  if (order != 2 && order != 4)
    throw ConfigError("finite-difference order must be 2 or 4");
  const double h = h_fd > 0.0 ? h_fd : default_fd_step(x);
  const std::size_t n = x.size();
  std::vector<double> rows(n * n);
  Vec y(x.begin(), x.end());
  auto at = [&](std::size_t i, double step) {
    y[i] = x[i] + step;
    Vec g = grad(y);
    y[i] = x[i];
    return g;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const Vec gp = at(i, h), gm = at(i, -h);
    if (order == 2) {
      for (std::size_t j = 0; j < n; ++j)
        rows[i * n + j] = (gp[j] - gm[j]) / (2.0 * h);
    } else {
      const Vec gpp = at(i, 2.0 * h), gmm = at(i, -2.0 * h);
      for (std::size_t j = 0; j < n; ++j)
        rows[i * n + j] = (8.0 * (gp[j] - gm[j]) - (gpp[j] - gmm[j])) / (12.0 * h);
    }
  }
  return SymMatrix(n, rows);
}

} // namespace pconvex
