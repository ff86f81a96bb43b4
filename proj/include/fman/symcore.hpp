#pragma once

// Exact symbolic arithmetic: sparse multivariate polynomials over Q and
// rational functions kept in canonical form.

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fman/errors.hpp"

namespace fman {

using Rational = mpq_class;
using VarId = std::uint32_t;

/// Process-wide interning of variable names.
/// Ids are stable for the lifetime of the process. A smaller id is the
/// larger variable in the lexicographic tie-break of grlex.
class VariableRegistry {
 public:
  static VarId intern(std::string_view name);
  static std::optional<VarId> find(std::string_view name);
  static std::string name(VarId id);
};

class Monomial {
 public:
  using Factor = std::pair<VarId, std::uint32_t>;

  Monomial() = default;
  static Monomial variable(VarId v, std::uint32_t exponent = 1);

  std::uint32_t degree() const { return degree_; }
  std::uint32_t exponent(VarId v) const;
  const std::vector<Factor>& factors() const { return factors_; }
  bool is_one() const { return factors_.empty(); }

  Monomial operator*(const Monomial& other) const;
  /// this / other, if other divides this.
  std::optional<Monomial> divide(const Monomial& other) const;
  Monomial gcd(const Monomial& other) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;  // sorted by id, exponents > 0
  std::uint32_t degree_ = 0;
};

/// grlex comparison: negative, zero or positive.
int compare(const Monomial& a, const Monomial& b);

struct Term {
  Monomial monomial;
  Rational coeff;
};

class Poly {
 public:
  Poly() = default;
  Poly(const Rational& c);  // NOLINT(google-explicit-constructor)
  Poly(long c);             // NOLINT(google-explicit-constructor)
  static Poly variable(VarId v);
  static Poly from_terms(std::vector<Term> terms);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  bool is_monomial() const { return terms_.size() == 1; }
  Rational constant_value() const;
  /// Terms in strictly decreasing grlex order.
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }

  std::uint32_t total_degree() const;
  std::uint32_t degree_in(VarId v) const;
  bool contains(VarId v) const;
  std::set<VarId> variables() const;

  Poly derivative(VarId v) const;
  Poly substitute(VarId v, const Poly& value) const;
  Poly rename(const std::map<VarId, VarId>& mapping) const;
  /// Coefficients as polynomials in the remaining variables, index = power of v.
  std::vector<Poly> coefficients_in(VarId v) const;
  Poly monic() const;
  Poly pow(unsigned e) const;

  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly operator-() const;

  friend bool operator==(const Poly& a, const Poly& b);

  std::string to_string() const;

 private:
  std::vector<Term> terms_;
};

/// a / b when b divides a exactly; nullopt otherwise.
std::optional<Poly> divide_exact(const Poly& a, const Poly& b);
/// Monic greatest common divisor; gcd(0, 0) = 0.
Poly gcd(const Poly& a, const Poly& b);

/// Quotient of polynomials with coprime numerator and denominator and
/// denominator monic in grlex order. Equal functions compare equal
/// structurally.
class RatFunc {
 public:
  RatFunc() : den_(1) {}
  RatFunc(long c) : num_(c), den_(1) {}                  // NOLINT
  RatFunc(const Rational& c) : num_(c), den_(1) {}       // NOLINT
  RatFunc(const Poly& p) : num_(p), den_(1) {}           // NOLINT
  RatFunc(const Poly& num, const Poly& den);
  static RatFunc variable(VarId v) { return RatFunc(Poly::variable(v)); }
  static RatFunc variable(std::string_view name);

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  std::set<VarId> variables() const;
  bool contains(VarId v) const { return num_.contains(v) || den_.contains(v); }

  RatFunc partial(VarId v) const;
  RatFunc substitute(VarId v, const Poly& value) const;
  RatFunc rename(const std::map<VarId, VarId>& mapping) const;
  RatFunc pow(int e) const;
  RatFunc inverse() const;

  RatFunc& operator+=(const RatFunc& o);
  RatFunc& operator-=(const RatFunc& o);
  RatFunc& operator*=(const RatFunc& o);
  RatFunc& operator/=(const RatFunc& o);
  friend RatFunc operator+(RatFunc a, const RatFunc& b) { return a += b; }
  friend RatFunc operator-(RatFunc a, const RatFunc& b) { return a -= b; }
  friend RatFunc operator*(RatFunc a, const RatFunc& b) { return a *= b; }
  friend RatFunc operator/(RatFunc a, const RatFunc& b) { return a /= b; }
  RatFunc operator-() const;

  friend bool operator==(const RatFunc& a, const RatFunc& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }

  std::string to_string() const;

 private:
  Poly num_;
  Poly den_;
};

/// Partial derivative by variable name; the name must already be registered.
RatFunc partial(const RatFunc& f, std::string_view var);

enum class ArithOp { add, sub, mul, div };
RatFunc arith(const RatFunc& a, const RatFunc& b, ArithOp op);

/// Parses
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := base ('^' integer)?
///   base   := rational | ident | '(' expr ')' | '-' factor
/// Identifiers must be listed in `vars`.
RatFunc parse_expr(std::string_view text, std::span<const std::string> vars);

using Matrix = std::vector<std::vector<RatFunc>>;

Matrix identity_matrix(std::size_t n);
Matrix multiply(const Matrix& a, const Matrix& b);
RatFunc determinant(const Matrix& m);
/// Inverse by fraction-free elimination; nullopt if singular.
std::optional<Matrix> inverse(const Matrix& m);

}  // namespace fman
