// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergocheck/solvers.hpp"

namespace ergocheck::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericalError = 2, kExpectMismatch = 3 };

/// Runs the command line `args` (without the program name). Reports go to
/// --out when given, otherwise to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "%.17g"
std::string format_double(double v);

/// JSON text with two-space indentation and every float printed "%.17g".
/// Non-finite floats become null.
std::string dump_json(const nlohmann::json& j);

/// Pair file: a "# rho=<value>" line, a header row starting with "x,V", then
/// one row per node. Extra columns are ignored on read.
void write_pair(std::ostream& os, const SolutionPair& pair);

/// (x, V) table as read from a pair file; x strictly increasing.
struct PairTable {
  double rho;
  std::vector<double> x;
  std::vector<double> V;
};

/// Throws Error(ParseError).
PairTable read_pair(std::istream& is);

/// Linear interpolation of the table onto `grid`. Throws InvalidGrid unless
/// the table covers [-L, L].
SolutionPair resample_pair(const PairTable& table, const Grid1D& grid);

}  // namespace ergocheck::cli
