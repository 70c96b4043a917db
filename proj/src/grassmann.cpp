#include "pconvex/grassmann.hpp"

#include <limits>

#include "pconvex/error.hpp"

namespace pconvex {

namespace {

SampledMinTrace scan_block(const SymMatrix &q, std::size_t p,
                           std::size_t first, std::size_t last,
                           std::uint64_t seed) {
  Rng rng(derive_seed(seed, first / kOracleBlock));
  SampledMinTrace best{std::numeric_limits<double>::infinity(), first, 0};
  for (std::size_t i = first; i < last; ++i) {
    const double tr = trace_on_plane(q, random_frame(q.dim(), p, rng));
    if (tr < best.min_trace) {
      best.min_trace = tr;
      best.argmin = i;
    }
  }
  best.samples = last - first;
  return best;
}

SampledMinTrace merge(const std::vector<SampledMinTrace> &blocks) {
  SampledMinTrace out{std::numeric_limits<double>::infinity(), 0, 0};
  for (const auto &b : blocks) {
    if (b.min_trace < out.min_trace) {
      out.min_trace = b.min_trace;
      out.argmin = b.argmin;
    }
    out.samples += b.samples;
  }
  return out;
}

void check_args(const SymMatrix &q, std::size_t p) {
  if (p < 1 || p >= q.dim())
    throw InvalidP("oracle needs 1 <= p < n");
}

template <class Sweep>
SampledMinTrace run(const SymMatrix &q, std::size_t p, std::size_t samples,
                    std::uint64_t seed, Sweep &&sweep_fn) {
  check_args(q, p);
  const std::size_t blocks = (samples + kOracleBlock - 1) / kOracleBlock;
  return merge(sweep_fn(blocks, [&](std::size_t b) {
    const std::size_t first = b * kOracleBlock;
    const std::size_t last = std::min(samples, first + kOracleBlock);
    return scan_block(q, p, first, last, seed);
  }));
}

} // namespace

SampledMinTrace grassmannian_min_trace_serial(const SymMatrix &q, std::size_t p,
                                              std::size_t samples,
                                              std::uint64_t seed) {
  return run(q, p, samples, seed,
             [](std::size_t n, auto &&fn) { return sweep_serial(n, fn); });
}

SampledMinTrace grassmannian_min_trace_omp(const SymMatrix &q, std::size_t p,
                                           std::size_t samples,
                                           std::uint64_t seed) {
  return run(q, p, samples, seed,
             [](std::size_t n, auto &&fn) { return sweep_omp(n, fn); });
}

SampledMinTrace grassmannian_min_trace(const SymMatrix &q, std::size_t p,
                                       std::size_t samples, std::uint64_t seed,
                                       Exec exec) {
  return exec == Exec::serial
             ? grassmannian_min_trace_serial(q, p, samples, seed)
             : grassmannian_min_trace_omp(q, p, samples, seed);
}

} // namespace pconvex
