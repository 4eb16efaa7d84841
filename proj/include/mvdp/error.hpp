#pragma once

#include <stdexcept>
#include <string>

namespace mvdp {

// Base of every error raised by the library. `category()` is the short tag
// printed by the CLI in front of the message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* category() const noexcept { return "error"; }
  // Usage/validation failures map to CLI exit code 2, everything else to 1.
  virtual bool is_validation() const noexcept { return false; }
};

#define MVDP_DEFINE_ERROR(Name, Tag, Validation)                         \
  class Name : public Error {                                            \
   public:                                                               \
    using Error::Error;                                                  \
    const char* category() const noexcept override { return Tag; }       \
    bool is_validation() const noexcept override { return Validation; } \
  };

MVDP_DEFINE_ERROR(SchemaError, "schema error", true)
MVDP_DEFINE_ERROR(ParseError, "parse error", true)
MVDP_DEFINE_ERROR(ValidationError, "validation error", true)
MVDP_DEFINE_ERROR(ConfigError, "config error", true)
MVDP_DEFINE_ERROR(UsageError, "usage error", true)
MVDP_DEFINE_ERROR(IoError, "io error", true)
MVDP_DEFINE_ERROR(ShapeError, "shape error", false)
MVDP_DEFINE_ERROR(NumericError, "numeric error", false)
MVDP_DEFINE_ERROR(SamplingError, "sampling error", false)
MVDP_DEFINE_ERROR(TrainingError, "training error", false)
MVDP_DEFINE_ERROR(EvaluationError, "evaluation error", false)
MVDP_DEFINE_ERROR(OptimizerError, "optimizer error", false)
MVDP_DEFINE_ERROR(CheckError, "check error", false)
MVDP_DEFINE_ERROR(AnalysisError, "analysis error", false)

#undef MVDP_DEFINE_ERROR

}  // namespace mvdp
