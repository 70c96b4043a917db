#pragma once

#include <stdexcept>
#include <string>

namespace pconvex {

// Base of every error raised by the library. The CLI maps any Error to exit
// status 2.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

#define PCONVEX_DEFINE_ERROR(Name)                                             \
  class Name : public Error {                                                  \
  public:                                                                      \
    explicit Name(const std::string &what) : Error(#Name ": " + what) {}       \
  }

PCONVEX_DEFINE_ERROR(InvalidMatrix);
PCONVEX_DEFINE_ERROR(DimensionError);
PCONVEX_DEFINE_ERROR(InvalidP);
PCONVEX_DEFINE_ERROR(RankError);
PCONVEX_DEFINE_ERROR(EvaluationError);
PCONVEX_DEFINE_ERROR(ParseError);
PCONVEX_DEFINE_ERROR(CatalogError);
PCONVEX_DEFINE_ERROR(ProjectionError);
PCONVEX_DEFINE_ERROR(DegenerateGradient);
PCONVEX_DEFINE_ERROR(SamplingError);
PCONVEX_DEFINE_ERROR(FrameError);
PCONVEX_DEFINE_ERROR(ConstructionError);
PCONVEX_DEFINE_ERROR(NotPConvex);
PCONVEX_DEFINE_ERROR(ImageOutsideDomain);
PCONVEX_DEFINE_ERROR(MapInvariantError);
PCONVEX_DEFINE_ERROR(ConfigError);

#undef PCONVEX_DEFINE_ERROR

} // namespace pconvex
