#pragma once

// Index-parallel sweeps. Every sweep writes result i into slot i, so the
// output is identical for the serial reference and the OpenMP path regardless
// of the worker count.

#include <cstddef>
#include <exception>
#include <vector>

#ifdef PCONVEX_HAVE_OPENMP
#include <omp.h>
#endif

namespace pconvex {

enum class Exec { serial, parallel };

// Worker cap: PCONVEX_THREADS if set and positive, else the OpenMP default.
int max_threads();

template <class Fn>
auto sweep_serial(std::size_t count, Fn &&fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  std::vector<decltype(fn(std::size_t{}))> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i)
    out.push_back(fn(i));
  return out;
}

template <class Fn>
auto sweep_omp(std::size_t count, Fn &&fn)
    -> std::vector<decltype(fn(std::size_t{}))> {
  using T = decltype(fn(std::size_t{}));
#ifdef PCONVEX_HAVE_OPENMP
  std::vector<T> out(count);
  // First failure by index wins so the surfaced error is deterministic.
  std::vector<std::exception_ptr> errors(count);
  const long long n = static_cast<long long>(count);
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads())
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fn(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto &e : errors)
    if (e)
      std::rethrow_exception(e);
  return out;
#else
  return sweep_serial(count, std::forward<Fn>(fn));
#endif
}

template <class Fn>
auto sweep(std::size_t count, Fn &&fn, Exec exec = Exec::parallel) {
  if (exec == Exec::serial || count < 2)
    return sweep_serial(count, std::forward<Fn>(fn));
  return sweep_omp(count, std::forward<Fn>(fn));
}

} // namespace pconvex
