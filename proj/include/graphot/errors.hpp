#pragma once

#include <stdexcept>
#include <string>

namespace graphot {

enum class ErrorCode {
  DisconnectedGraph,
  NonPositiveLength,
  SelfLoop,
  DuplicateEdgeId,
  PointNotOnGraph,
  ParameterOutOfRange,
  NotProbability,
  AsymmetricKernel,
  EpsilonTooLarge,
  UnbalancedMasses,
  NegativeTime,
  PlanMarginalMismatch,
  AtomPresent,
  GridMismatch,
  GridMisaligned,
  NotConverged,
  SingularSystem,
  NonPositiveDt,
  InfiniteDissipation,
  InfiniteEnergy,
  ConfigInvalid,
  SubcommandUnknown,
};

const char* error_code_name(ErrorCode code);

// All toolkit errors carry a code so callers can dispatch without string
// matching; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace graphot
