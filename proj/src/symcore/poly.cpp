#include <algorithm>
#include <mutex>
#include <unordered_map>

#include "fman/symcore.hpp"

namespace fman {

namespace {

struct Registry {
  std::mutex mutex;
  std::vector<std::string> names;
  std::unordered_map<std::string, VarId> ids;
};

Registry& registry() {
  static Registry r;
  return r;
}

struct GreaterMonomial {
  bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }
};

}  // namespace

VarId VariableRegistry::intern(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.ids.find(std::string(name));
  if (it != r.ids.end()) return it->second;
  auto id = static_cast<VarId>(r.names.size());
  r.names.emplace_back(name);
  r.ids.emplace(std::string(name), id);
  return id;
}

std::optional<VarId> VariableRegistry::find(std::string_view name) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  auto it = r.ids.find(std::string(name));
  if (it == r.ids.end()) return std::nullopt;
  return it->second;
}

std::string VariableRegistry::name(VarId id) {
  auto& r = registry();
  std::lock_guard lock(r.mutex);
  return r.names.at(id);
}

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(VarId v, std::uint32_t exponent) {
  Monomial m;
  if (exponent > 0) {
    m.factors_.emplace_back(v, exponent);
    m.degree_ = exponent;
  }
  return m;
}

std::uint32_t Monomial::exponent(VarId v) const {
  for (const auto& [id, e] : factors_) {
    if (id == v) return e;
    if (id > v) break;
  }
  return 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r;
  r.factors_.reserve(factors_.size() + other.factors_.size());
  auto i = factors_.begin(), j = other.factors_.begin();
  while (i != factors_.end() || j != other.factors_.end()) {
    if (j == other.factors_.end() || (i != factors_.end() && i->first < j->first)) {
      r.factors_.push_back(*i++);
    } else if (i == factors_.end() || j->first < i->first) {
      r.factors_.push_back(*j++);
    } else {
      r.factors_.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  r.degree_ = degree_ + other.degree_;
  return r;
}

std::optional<Monomial> Monomial::divide(const Monomial& other) const {
  if (other.degree_ > degree_) return std::nullopt;
  Monomial r;
  auto i = factors_.begin();
  for (const auto& [v, e] : other.factors_) {
    while (i != factors_.end() && i->first < v) r.factors_.push_back(*i++);
    if (i == factors_.end() || i->first != v || i->second < e) return std::nullopt;
    if (i->second > e) r.factors_.emplace_back(v, i->second - e);
    ++i;
  }
  while (i != factors_.end()) r.factors_.push_back(*i++);
  r.degree_ = degree_ - other.degree_;
  return r;
}

Monomial Monomial::gcd(const Monomial& other) const {
  Monomial r;
  for (const auto& [v, e] : factors_) {
    auto f = std::min(e, other.exponent(v));
    if (f > 0) {
      r.factors_.emplace_back(v, f);
      r.degree_ += f;
    }
  }
  return r;
}

int compare(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() < b.degree() ? -1 : 1;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t i = 0, j = 0;
  while (i < fa.size() && j < fb.size()) {
    if (fa[i].first != fb[j].first) return fa[i].first < fb[j].first ? 1 : -1;
    if (fa[i].second != fb[j].second) return fa[i].second > fb[j].second ? 1 : -1;
    ++i;
    ++j;
  }
  if (i < fa.size()) return 1;
  if (j < fb.size()) return -1;
  return 0;
}

// -------------------------------------------------------------------- Poly

Poly::Poly(const Rational& c) {
  if (c != 0) terms_.push_back({Monomial(), c});
}

Poly::Poly(long c) : Poly(Rational(c)) {}

Poly Poly::variable(VarId v) {
  Poly p;
  p.terms_.push_back({Monomial::variable(v), Rational(1)});
  return p;
}

Poly Poly::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return compare(a.monomial, b.monomial) > 0; });
  Poly p;
  for (auto& t : terms) {
    if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
      p.terms_.back().coeff += t.coeff;
    } else {
      if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
      p.terms_.push_back(std::move(t));
    }
  }
  if (!p.terms_.empty() && p.terms_.back().coeff == 0) p.terms_.pop_back();
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].monomial.is_one());
}

Rational Poly::constant_value() const {
  for (const auto& t : terms_)
    if (t.monomial.is_one()) return t.coeff;
  return 0;
}

std::uint32_t Poly::total_degree() const { return terms_.empty() ? 0 : terms_.front().monomial.degree(); }

std::uint32_t Poly::degree_in(VarId v) const {
  std::uint32_t d = 0;
  for (const auto& t : terms_) d = std::max(d, t.monomial.exponent(v));
  return d;
}

bool Poly::contains(VarId v) const {
  return std::any_of(terms_.begin(), terms_.end(),
                     [v](const Term& t) { return t.monomial.exponent(v) > 0; });
}

std::set<VarId> Poly::variables() const {
  std::set<VarId> out;
  for (const auto& t : terms_)
    for (const auto& f : t.monomial.factors()) out.insert(f.first);
  return out;
}

Poly Poly::derivative(VarId v) const {
  std::vector<Term> out;
  auto x = Monomial::variable(v);
  for (const auto& t : terms_) {
    auto e = t.monomial.exponent(v);
    if (e == 0) continue;
    out.push_back({*t.monomial.divide(x), t.coeff * e});
  }
  return from_terms(std::move(out));
}

std::vector<Poly> Poly::coefficients_in(VarId v) const {
  std::vector<std::vector<Term>> buckets(degree_in(v) + 1);
  for (const auto& t : terms_) {
    auto e = t.monomial.exponent(v);
    buckets[e].push_back({*t.monomial.divide(Monomial::variable(v, e)), t.coeff});
  }
  std::vector<Poly> out;
  out.reserve(buckets.size());
  for (auto& b : buckets) out.push_back(from_terms(std::move(b)));
  return out;
}

Poly Poly::substitute(VarId v, const Poly& value) const {
  if (!contains(v)) return *this;
  auto cs = coefficients_in(v);
  Poly r;
  for (auto it = cs.rbegin(); it != cs.rend(); ++it) r = r * value + *it;
  return r;
}

Poly Poly::rename(const std::map<VarId, VarId>& mapping) const {
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (const auto& t : terms_) {
    Monomial m;
    for (const auto& [v, e] : t.monomial.factors()) {
      auto it = mapping.find(v);
      m = m * Monomial::variable(it == mapping.end() ? v : it->second, e);
    }
    out.push_back({std::move(m), t.coeff});
  }
  return from_terms(std::move(out));
}

Poly Poly::monic() const {
  if (terms_.empty()) return *this;
  Rational lc = terms_.front().coeff;
  if (lc == 1) return *this;
  Poly r = *this;
  for (auto& t : r.terms_) t.coeff /= lc;
  return r;
}

Poly Poly::pow(unsigned e) const {
  Poly r(1), base = *this;
  while (e > 0) {
    if (e & 1U) r = r * base;
    e >>= 1U;
    if (e > 0) base = base * base;
  }
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  std::vector<Term> out;
  out.reserve(terms_.size() + o.terms_.size());
  auto i = terms_.begin();
  auto j = o.terms_.begin();
  while (i != terms_.end() || j != o.terms_.end()) {
    int c = i == terms_.end() ? -1 : j == o.terms_.end() ? 1 : compare(i->monomial, j->monomial);
    if (c > 0) {
      out.push_back(std::move(*i++));
    } else if (c < 0) {
      out.push_back(*j++);
    } else {
      Rational s = i->coeff + j->coeff;
      if (s != 0) out.push_back({std::move(i->monomial), std::move(s)});
      ++i;
      ++j;
    }
  }
  terms_ = std::move(out);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) { return *this += -o; }

Poly& Poly::operator*=(const Poly& o) { return *this = *this * o; }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (a.is_constant() || b.is_constant()) {
    const Poly& c = a.is_constant() ? a : b;
    Poly r = a.is_constant() ? b : a;
    Rational k = c.terms_.front().coeff;
    for (auto& t : r.terms_) t.coeff *= k;
    return r;
  }
  std::map<Monomial, Rational, GreaterMonomial> acc;
  for (const auto& s : a.terms_)
    for (const auto& t : b.terms_) {
      auto [it, inserted] = acc.try_emplace(s.monomial * t.monomial, s.coeff * t.coeff);
      if (!inserted) it->second += s.coeff * t.coeff;
    }
  Poly r;
  r.terms_.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) r.terms_.push_back({m, c});
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& t : r.terms_) t.coeff = -t.coeff;
  return r;
}

bool operator==(const Poly& a, const Poly& b) {
  if (a.terms_.size() != b.terms_.size()) return false;
  for (std::size_t i = 0; i < a.terms_.size(); ++i)
    if (a.terms_[i].coeff != b.terms_[i].coeff || !(a.terms_[i].monomial == b.terms_[i].monomial))
      return false;
  return true;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms_) {
    bool negative = t.coeff < 0;
    Rational mag = abs(t.coeff);
    if (first) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    bool unit = mag == 1 && !t.monomial.is_one();
    if (!unit) {
      out += mag.get_str();
      if (!t.monomial.is_one()) out += "*";
    }
    bool first_factor = true;
    for (const auto& [v, e] : t.monomial.factors()) {
      if (!first_factor) out += "*";
      first_factor = false;
      out += VariableRegistry::name(v);
      if (e > 1) out += "^" + std::to_string(e);
    }
  }
  return out;
}

// ------------------------------------------------------------ division, gcd

std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw DivisionByZero();
  if (a.is_zero()) return Poly();
  if (b.is_constant()) return a * Poly(Rational(1) / b.leading().coeff);
  const Term& lb = b.leading();
  std::vector<Term> q;
  Poly r = a;
  while (!r.is_zero()) {
    const Term& lr = r.leading();
    auto m = lr.monomial.divide(lb.monomial);
    if (!m) return std::nullopt;
    Term t{*m, lr.coeff / lb.coeff};
    Poly step = Poly::from_terms({t});
    q.push_back(std::move(t));
    r -= step * b;
  }
  return Poly::from_terms(std::move(q));
}

namespace {

Poly content_in(const Poly& p, VarId v) {
  Poly g;
  for (const auto& c : p.coefficients_in(v)) {
    if (c.is_zero()) continue;
    g = gcd(g, c);
    if (g.is_constant()) return Poly(1);
  }
  return g;
}

Poly primitive_part(const Poly& p, VarId v) { return *divide_exact(p, content_in(p, v)); }

Poly pseudo_remainder(const Poly& a, const Poly& b, VarId v) {
  auto db = b.degree_in(v);
  Poly lcb = b.coefficients_in(v).back();
  Poly r = a;
  while (!r.is_zero() && r.degree_in(v) >= db) {
    auto dr = r.degree_in(v);
    Poly lcr = r.coefficients_in(v).back();
    r = lcb * r - lcr * Poly::from_terms({{Monomial::variable(v, dr - db), Rational(1)}}) * b;
  }
  return r;
}

Poly primitive_gcd(Poly a, Poly b, VarId v) {
  if (a.degree_in(v) < b.degree_in(v)) std::swap(a, b);
  for (;;) {
    Poly r = pseudo_remainder(a, b, v);
    if (r.is_zero()) return primitive_part(b, v);
    if (r.degree_in(v) == 0) return Poly(1);
    a = std::move(b);
    b = primitive_part(r, v);
  }
}

Poly monomial_gcd(const Poly& m, const Poly& p) {
  Monomial g = m.leading().monomial;
  for (const auto& t : p.terms()) {
    g = g.gcd(t.monomial);
    if (g.is_one()) break;
  }
  return Poly::from_terms({{g, Rational(1)}});
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return b.monic();
  if (b.is_zero()) return a.monic();
  if (a.is_constant() || b.is_constant()) return Poly(1);
  if (a == b) return a.monic();
  if (a.is_monomial()) return monomial_gcd(a, b);
  if (b.is_monomial()) return monomial_gcd(b, a);
  auto va = a.variables();
  auto vb = b.variables();
  VarId v = std::min(*va.begin(), *vb.begin());
  if (!a.contains(v)) return gcd(a, content_in(b, v));
  if (!b.contains(v)) return gcd(content_in(a, v), b);
  Poly ca = content_in(a, v);
  Poly cb = content_in(b, v);
  Poly g = primitive_gcd(*divide_exact(a, ca), *divide_exact(b, cb), v);
  return (gcd(ca, cb) * g).monic();
}

}  // namespace fman
