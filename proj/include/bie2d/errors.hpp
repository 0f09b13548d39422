#pragma once

#include <stdexcept>
#include <string>

namespace bie2d {

// Base class for all recoverable errors raised by the library.  Each concrete
// error keeps a stable name() so callers (and the CLI) can report the failure
// class without parsing message text.
class Error : public std::runtime_error {
 public:
  Error(std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), name_(std::move(name)) {}
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

#define BIE2D_DEFINE_ERROR(NAME)                                  \
  class NAME : public Error {                                     \
   public:                                                        \
    explicit NAME(const std::string& what) : Error(#NAME, what) {} \
  }

BIE2D_DEFINE_ERROR(DegenerateSpeed);
BIE2D_DEFINE_ERROR(IntersectingCurves);
BIE2D_DEFINE_ERROR(NotNested);
BIE2D_DEFINE_ERROR(BadSigma);
BIE2D_DEFINE_ERROR(CoincidentPoints);
BIE2D_DEFINE_ERROR(IndexMismatch);
BIE2D_DEFINE_ERROR(CompatibilityViolation);
BIE2D_DEFINE_ERROR(EmptyPanel);
BIE2D_DEFINE_ERROR(DegenerateSegment);
BIE2D_DEFINE_ERROR(RankFailure);
BIE2D_DEFINE_ERROR(OutOfDomain);
BIE2D_DEFINE_ERROR(OutOfRange);
BIE2D_DEFINE_ERROR(BadConfig);

#undef BIE2D_DEFINE_ERROR

}  // namespace bie2d
