#include "graphot/errors.hpp"

namespace graphot {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::DisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::NonPositiveLength: return "NonPositiveLength";
    case ErrorCode::SelfLoop: return "SelfLoop";
    case ErrorCode::DuplicateEdgeId: return "DuplicateEdgeId";
    case ErrorCode::PointNotOnGraph: return "PointNotOnGraph";
    case ErrorCode::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorCode::NotProbability: return "NotProbability";
    case ErrorCode::AsymmetricKernel: return "AsymmetricKernel";
    case ErrorCode::EpsilonTooLarge: return "EpsilonTooLarge";
    case ErrorCode::UnbalancedMasses: return "UnbalancedMasses";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::PlanMarginalMismatch: return "PlanMarginalMismatch";
    case ErrorCode::AtomPresent: return "AtomPresent";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::GridMisaligned: return "GridMisaligned";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonPositiveDt: return "NonPositiveDt";
    case ErrorCode::InfiniteDissipation: return "InfiniteDissipation";
    case ErrorCode::InfiniteEnergy: return "InfiniteEnergy";
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::SubcommandUnknown: return "SubcommandUnknown";
  }
  return "UnknownError";
}

}  // namespace graphot
