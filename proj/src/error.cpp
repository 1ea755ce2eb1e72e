// SPDX-License-Identifier: Apache-2.0
#include "ergocheck/error.hpp"

namespace ergocheck {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::PolicyLengthMismatch: return "PolicyLengthMismatch";
    case Errc::PolicyDomainMismatch: return "PolicyDomainMismatch";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::TransienceDetected: return "TransienceDetected";
    case Errc::InconsistentSystem: return "InconsistentSystem";
    case Errc::InvalidRadius: return "InvalidRadius";
    case Errc::UnstableInitialPolicy: return "UnstableInitialPolicy";
    case Errc::NonMonotone: return "NonMonotone";
    case Errc::NoConvergence: return "NoConvergence";
    case Errc::NonDegeneracyViolation: return "NonDegeneracyViolation";
    case Errc::NegativeCost: return "NegativeCost";
    case Errc::RatioUnbounded: return "RatioUnbounded";
    case Errc::DomainError: return "DomainError";
    case Errc::QuadratureFailure: return "QuadratureFailure";
    case Errc::RhoOutOfRange: return "RhoOutOfRange";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::CensoringExcessive: return "CensoringExcessive";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

}  // namespace ergocheck
