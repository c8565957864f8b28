#pragma once

#include <stdexcept>
#include <string>

namespace kleinian {

enum class ErrorCode {
  InvalidPoint,
  DimensionMismatch,
  NumericallyAmbiguous,
  DiscsOverlap,
  EnlargedDiscsOverlap,
  PingPongViolated,
  BudgetExceeded,
  TargetNotInDomainClosure,
  InvalidSeparation,
  InconclusiveBracket,
  PlacementInfeasible,
  StabilizerNotParabolic,
  StabilizerNotFixing,
  ImageOverflow,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidPoint: return "InvalidPoint";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericallyAmbiguous: return "NumericallyAmbiguous";
    case ErrorCode::DiscsOverlap: return "DiscsOverlap";
    case ErrorCode::EnlargedDiscsOverlap: return "EnlargedDiscsOverlap";
    case ErrorCode::PingPongViolated: return "PingPongViolated";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TargetNotInDomainClosure: return "TargetNotInDomainClosure";
    case ErrorCode::InvalidSeparation: return "InvalidSeparation";
    case ErrorCode::InconclusiveBracket: return "InconclusiveBracket";
    case ErrorCode::PlacementInfeasible: return "PlacementInfeasible";
    case ErrorCode::StabilizerNotParabolic: return "StabilizerNotParabolic";
    case ErrorCode::StabilizerNotFixing: return "StabilizerNotFixing";
    case ErrorCode::ImageOverflow: return "ImageOverflow";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace kleinian
