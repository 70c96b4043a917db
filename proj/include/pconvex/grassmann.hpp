#pragma once

// Randomized Grassmannian oracle: minimum restricted trace over sampled
// p-planes. Used to cross-check the eigenvalue formula for min_trace_p
// independently of the eigensolver.

#include <cstddef>
#include <cstdint>

#include "pconvex/linalg.hpp"
#include "pconvex/parallel.hpp"

namespace pconvex {

struct SampledMinTrace {
  double min_trace = 0.0;
  std::size_t argmin = 0; // sample index of the minimizer
  std::size_t samples = 0;
};

// Planes are drawn in fixed blocks of kOracleBlock samples, block b seeded by
// derive_seed(seed, b), so serial and parallel runs see the same planes.
inline constexpr std::size_t kOracleBlock = 1024;

SampledMinTrace grassmannian_min_trace_serial(const SymMatrix &q, std::size_t p,
                                              std::size_t samples,
                                              std::uint64_t seed);
SampledMinTrace grassmannian_min_trace_omp(const SymMatrix &q, std::size_t p,
                                           std::size_t samples,
                                           std::uint64_t seed);
SampledMinTrace grassmannian_min_trace(const SymMatrix &q, std::size_t p,
                                       std::size_t samples, std::uint64_t seed,
                                       Exec exec = Exec::parallel);

} // namespace pconvex
