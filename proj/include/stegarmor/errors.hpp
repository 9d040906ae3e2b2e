#pragma once

#include <stdexcept>
#include <string>

namespace stegarmor {

// Base for every error raised by the library. Callers that do not care about
// the specific kind can catch this one.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STEGARMOR_DEFINE_ERROR(Name)                  \
  class Name : public Error {                         \
   public:                                            \
    explicit Name(const std::string& what)            \
        : Error(std::string(#Name ": ") + what) {}    \
  }

STEGARMOR_DEFINE_ERROR(MalformedStream);
STEGARMOR_DEFINE_ERROR(UnsupportedFeature);
STEGARMOR_DEFINE_ERROR(CoefficientOverflow);
STEGARMOR_DEFINE_ERROR(InvalidQuality);
STEGARMOR_DEFINE_ERROR(InvalidAlpha);
STEGARMOR_DEFINE_ERROR(InvalidDomainIndex);
STEGARMOR_DEFINE_ERROR(LengthMismatch);
STEGARMOR_DEFINE_ERROR(InvalidCapability);
STEGARMOR_DEFINE_ERROR(FramingError);
STEGARMOR_DEFINE_ERROR(CapacityExceeded);
STEGARMOR_DEFINE_ERROR(InfeasibleSyndrome);
STEGARMOR_DEFINE_ERROR(DimensionMismatch);
STEGARMOR_DEFINE_ERROR(InvalidPayload);
STEGARMOR_DEFINE_ERROR(InvalidArgument);

#undef STEGARMOR_DEFINE_ERROR

}  // namespace stegarmor
