#include "pconvex/parallel.hpp"

#include <cstdlib>
#include <string>

namespace pconvex {

int max_threads() {
  int cap = 0;
  if (const char *env = std::getenv("PCONVEX_THREADS")) {
    try {
      cap = std::stoi(env);
    } catch (...) {
      cap = 0;
    }
  }
#ifdef PCONVEX_HAVE_OPENMP
  const int avail = omp_get_max_threads();
#else
  const int avail = 1;
#endif
  return cap > 0 && cap < avail ? cap : avail;
}

} // namespace pconvex
