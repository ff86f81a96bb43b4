#include "fman/report.hpp"

namespace fman {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::skipped: return "skipped";
  }
  return "?";
}

bool Report::passed() const {
  for (const auto& r : records)
    if (r.verdict != Verdict::pass) return false;
  return true;
}

const IdentityRecord* Report::first_failure() const {
  for (const auto& r : records)
    if (r.verdict == Verdict::fail) return &r;
  return nullptr;
}

const IdentityRecord* Report::find(const std::string& identity) const {
  for (const auto& r : records)
    if (r.identity == identity) return &r;
  return nullptr;
}

void Report::append(const Report& other) {
  records.insert(records.end(), other.records.begin(), other.records.end());
  notes.insert(notes.end(), other.notes.begin(), other.notes.end());
}

std::optional<Violation> first_violation(const IdentityCheck& check) {
  std::size_t slots = check.ranges.size();
  for (int r : check.ranges)
    if (r <= 0) return std::nullopt;
  std::vector<int> idx(slots, 0);
  for (;;) {
    auto res = check.residual(idx);
    for (const auto& v : res)
      if (!v.is_zero()) return Violation{idx, std::move(res)};
    std::size_t r = slots;
    while (r > 0) {
      --r;
      if (++idx[r] < check.ranges[r]) break;
      idx[r] = 0;
      if (r == 0) return std::nullopt;
    }
    if (slots == 0) return std::nullopt;
  }
}

std::string residual_to_string(const std::vector<RatFunc>& r) {
  if (r.size() == 1) return r[0].to_string();
  std::string s = "[";
  for (std::size_t i = 0; i < r.size(); ++i) s += (i ? ", " : "") + r[i].to_string();
  return s + "]";
}

IdentityRecord run_identities(const std::string& identity, const std::string& anchor,
                              const std::vector<IdentityCheck>& checks) {
  IdentityRecord rec;
  rec.identity = identity;
  rec.anchor = anchor;
  for (const auto& c : checks) {
    auto v = first_violation(c);
    if (!v) continue;
    rec.verdict = Verdict::fail;
    rec.condition = c.name;
    for (std::size_t i = 0; i < v->indices.size(); ++i) rec.witness.emplace_back(c.labels[i], v->indices[i]);
    rec.residual = residual_to_string(v->residual);
    rec.note = c.formula;
    return rec;
  }
  return rec;
}

IdentityRecord skipped_record(const std::string& identity, const std::string& anchor, const std::string& why) {
  IdentityRecord rec;
  rec.identity = identity;
  rec.anchor = anchor;
  rec.verdict = Verdict::skipped;
  rec.note = why;
  return rec;
}

}  // namespace fman
