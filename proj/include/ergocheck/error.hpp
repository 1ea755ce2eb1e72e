// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ergocheck {

enum class Errc {
  InvalidArgument,
  InvalidGrid,
  PolicyLengthMismatch,
  PolicyDomainMismatch,
  SingularSystem,
  TransienceDetected,
  InconsistentSystem,
  InvalidRadius,
  UnstableInitialPolicy,
  NonMonotone,
  NoConvergence,
  NonDegeneracyViolation,
  NegativeCost,
  RatioUnbounded,
  DomainError,
  QuadratureFailure,
  RhoOutOfRange,
  InvalidConfig,
  CensoringExcessive,
  ParseError,
};

const char* to_string(Errc code) noexcept;

/// Every failure raised by the library carries one of the codes above so that
/// callers (CLI, bindings) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ergocheck
