#pragma once

// Command dispatch for the fman tool.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fman/model.hpp"

namespace fman::cli {

enum ExitCode { kPass = 0, kCheckFailure = 1, kInputError = 2, kPreconditionError = 3 };

struct CheckResult {
  std::string command;
  std::string model;
  Report report;
  double seconds = 0;
  std::optional<std::string> precondition;  // set when the command stopped on an unmet precondition
};

std::string render_text(const CheckResult& r);
/// Stable JSON; timing is the only field that varies between runs.
std::string render_json(const CheckResult& r);

/// args excludes the program name. `-` as a model path reads `in`.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace fman::cli
