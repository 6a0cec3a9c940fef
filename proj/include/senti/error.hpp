#pragma once

#include <stdexcept>
#include <string>

namespace senti {

// Base of every error the library raises. kind() is a stable token used by the
// CLI for its one-line machine-parsable error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define SENTI_DEFINE_ERROR(Name, token)                                  \
  class Name : public Error {                                            \
   public:                                                               \
    explicit Name(const std::string& what) : Error(token, what) {}       \
  };

SENTI_DEFINE_ERROR(DimensionError, "dimension")
SENTI_DEFINE_ERROR(ParameterError, "parameter")
SENTI_DEFINE_ERROR(ContractError, "contract")
SENTI_DEFINE_ERROR(LookupError, "lookup")
SENTI_DEFINE_ERROR(BuildError, "build")
SENTI_DEFINE_ERROR(ParseError, "parse")
SENTI_DEFINE_ERROR(IngestError, "ingest")
SENTI_DEFINE_ERROR(MetricError, "undefined-metric")
SENTI_DEFINE_ERROR(DivergenceError, "divergence")
SENTI_DEFINE_ERROR(PlanError, "plan")
SENTI_DEFINE_ERROR(ConfigError, "config")
SENTI_DEFINE_ERROR(IoError, "io")

class CheckpointError : public Error {
 public:
  CheckpointError(std::string kind, const std::string& what) : Error(std::move(kind), what) {}
};
class CheckpointVersionError : public CheckpointError {
 public:
  explicit CheckpointVersionError(const std::string& what) : CheckpointError("checkpoint-version", what) {}
};
class CheckpointShapeError : public CheckpointError {
 public:
  explicit CheckpointShapeError(const std::string& what) : CheckpointError("checkpoint-shape", what) {}
};
// Short file or failed integrity checksum; either way the payload is incomplete.
class CheckpointTruncatedError : public CheckpointError {
 public:
  explicit CheckpointTruncatedError(const std::string& what) : CheckpointError("checkpoint-truncated", what) {}
};

#undef SENTI_DEFINE_ERROR

}  // namespace senti
