#pragma once

#include <stdexcept>
#include <string>

namespace ridgeboot {

/// Base of every error raised by the library. `kind()` is the stable name the
/// CLI prints on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define RIDGEBOOT_DEFINE_ERROR(Name, tag)                       \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what) : Error(tag, what) {} \
  };

RIDGEBOOT_DEFINE_ERROR(InputError, "input-error")
RIDGEBOOT_DEFINE_ERROR(SingularSystemError, "singular-system")
RIDGEBOOT_DEFINE_ERROR(DegenerateContrastError, "degenerate-contrast")
RIDGEBOOT_DEFINE_ERROR(UnestimableVarianceError, "unestimable-variance")
RIDGEBOOT_DEFINE_ERROR(MomentConditionError, "moment-condition")
RIDGEBOOT_DEFINE_ERROR(InsufficientDataError, "insufficient-data")
RIDGEBOOT_DEFINE_ERROR(DegenerateDataError, "degenerate-data")
RIDGEBOOT_DEFINE_ERROR(PreconditionError, "precondition")
RIDGEBOOT_DEFINE_ERROR(ConfigError, "config-error")
RIDGEBOOT_DEFINE_ERROR(IoError, "io-error")

#undef RIDGEBOOT_DEFINE_ERROR

}  // namespace ridgeboot
