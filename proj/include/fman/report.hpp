#pragma once

// Structured verdicts shared by every checking operation.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fman/symcore.hpp"

namespace fman {

enum class Verdict { pass, fail, skipped };

std::string to_string(Verdict v);

struct IdentityRecord {
  std::string identity;   // record name, e.g. "associativity"
  std::string anchor;     // the identity in formula form
  Verdict verdict = Verdict::pass;
  std::string condition;  // failing sub-identity, empty on pass
  std::vector<std::pair<std::string, int>> witness;  // 0-based frame indices
  std::string residual;   // nonzero left-minus-right side at the witness
  std::string note;
};

struct Report {
  std::string title;
  std::vector<IdentityRecord> records;
  std::vector<std::string> notes;

  /// True when every record passed (skipped records count as not passed).
  bool passed() const;
  const IdentityRecord* first_failure() const;
  const IdentityRecord* find(const std::string& identity) const;
  void append(const Report& other);
};

/// One quantified identity: residual(indices) must vanish for every index
/// tuple with indices[r] in [0, ranges[r]).
struct IdentityCheck {
  std::string name;
  std::string formula;
  std::vector<std::string> labels;
  std::vector<int> ranges;
  std::function<std::vector<RatFunc>(const std::vector<int>&)> residual;
};

struct Violation {
  std::vector<int> indices;
  std::vector<RatFunc> residual;
};

/// First failing tuple in lexicographic order (first slot outermost).
std::optional<Violation> first_violation(const IdentityCheck& check);

/// Runs the checks in order and stops at the first violated one.
IdentityRecord run_identities(const std::string& identity, const std::string& anchor,
                              const std::vector<IdentityCheck>& checks);

IdentityRecord skipped_record(const std::string& identity, const std::string& anchor, const std::string& why);

std::string residual_to_string(const std::vector<RatFunc>& r);

}  // namespace fman
