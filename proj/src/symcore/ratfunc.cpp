#include <cctype>

#include "fman/symcore.hpp"

namespace fman {

RatFunc::RatFunc(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw DivisionByZero();
  if (num.is_zero()) {
    den_ = Poly(1);
    return;
  }
  if (den.is_constant()) {
    num_ = num * Poly(Rational(1) / den.constant_value());
    den_ = Poly(1);
    return;
  }
  Poly g = gcd(num, den);
  Poly n = g.is_constant() ? num : *divide_exact(num, g);
  Poly d = g.is_constant() ? den : *divide_exact(den, g);
  Rational lc = d.leading().coeff;
  num_ = n * Poly(Rational(1) / lc);
  den_ = d * Poly(Rational(1) / lc);
}

RatFunc RatFunc::variable(std::string_view name) {
  return variable(VariableRegistry::intern(name));
}

std::set<VarId> RatFunc::variables() const {
  auto v = num_.variables();
  auto d = den_.variables();
  v.insert(d.begin(), d.end());
  return v;
}

RatFunc RatFunc::partial(VarId v) const {
  if (den_.is_constant()) return RatFunc(num_.derivative(v));
  Poly top = num_.derivative(v) * den_ - num_ * den_.derivative(v);
  return RatFunc(top, den_ * den_);
}

RatFunc RatFunc::substitute(VarId v, const Poly& value) const {
  if (!contains(v)) return *this;
  return RatFunc(num_.substitute(v, value), den_.substitute(v, value));
}

RatFunc RatFunc::rename(const std::map<VarId, VarId>& mapping) const {
  return RatFunc(num_.rename(mapping), den_.rename(mapping));
}

RatFunc RatFunc::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  RatFunc r;
  r.num_ = num_.pow(static_cast<unsigned>(e));
  r.den_ = den_.pow(static_cast<unsigned>(e));
  return r;
}

RatFunc RatFunc::inverse() const {
  if (num_.is_zero()) throw DivisionByZero();
  return RatFunc(den_, num_);
}

RatFunc& RatFunc::operator+=(const RatFunc& o) {
  if (o.is_zero()) return *this;
  if (is_zero()) return *this = o;
  if (den_.is_constant() && o.den_.is_constant()) {
    num_ += o.num_;
    return *this;
  }
  if (den_ == o.den_) return *this = RatFunc(num_ + o.num_, den_);
  Poly g = gcd(den_, o.den_);
  Poly a = *divide_exact(den_, g);
  Poly b = *divide_exact(o.den_, g);
  return *this = RatFunc(num_ * b + o.num_ * a, a * o.den_);
}

RatFunc& RatFunc::operator-=(const RatFunc& o) { return *this += -o; }

RatFunc& RatFunc::operator*=(const RatFunc& o) {
  if (is_zero() || o.is_zero()) return *this = RatFunc();
  if (den_.is_constant() && o.den_.is_constant()) {
    num_ *= o.num_;
    return *this;
  }
  Poly g1 = gcd(num_, o.den_);
  Poly g2 = gcd(o.num_, den_);
  Poly n = *divide_exact(num_, g1) * *divide_exact(o.num_, g2);
  Poly d = *divide_exact(den_, g2) * *divide_exact(o.den_, g1);
  Rational lc = d.leading().coeff;
  num_ = n * Poly(Rational(1) / lc);
  den_ = d * Poly(Rational(1) / lc);
  return *this;
}

RatFunc& RatFunc::operator/=(const RatFunc& o) { return *this *= o.inverse(); }

RatFunc RatFunc::operator-() const {
  RatFunc r = *this;
  r.num_ = -r.num_;
  return r;
}

std::string RatFunc::to_string() const {
  if (den_.is_constant()) return num_.to_string();
  return "(" + num_.to_string() + ")/(" + den_.to_string() + ")";
}

RatFunc partial(const RatFunc& f, std::string_view var) {
  auto id = VariableRegistry::find(var);
  if (!id) throw UnknownVariable(std::string(var), 0);
  return f.partial(*id);
}

RatFunc arith(const RatFunc& a, const RatFunc& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  return {};
}

// ------------------------------------------------------------------ parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, std::span<const std::string> vars) : text_(text), vars_(vars) {}

  RatFunc parse() {
    RatFunc r = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected character");
    return r;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  RatFunc expr() {
    RatFunc r = term();
    for (;;) {
      if (accept('+')) r += term();
      else if (accept('-')) r -= term();
      else return r;
    }
  }

  RatFunc term() {
    RatFunc r = factor();
    for (;;) {
      if (accept('*')) {
        r *= factor();
      } else if (accept('/')) {
        std::size_t at = pos_;
        RatFunc d = factor();
        if (d.is_zero()) throw ParseError("division by zero", at);
        r /= d;
      } else {
        return r;
      }
    }
  }

  RatFunc factor() {
    RatFunc b = base();
    if (!accept('^')) return b;
    skip();
    std::size_t at = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    if (pos_ - start > 6) throw ParseError("exponent too large", start);
    int e = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (negative) {
      if (b.is_zero()) throw ParseError("division by zero", at);
      e = -e;
    }
    return b.pow(e);
  }

  RatFunc base() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      return RatFunc(Rational(mpz_class(std::string(text_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string name(text_.substr(start, pos_ - start));
      for (const auto& v : vars_)
        if (v == name) return RatFunc::variable(name);
      throw UnknownVariable(name, start);
    }
    if (c == '(') {
      ++pos_;
      RatFunc r = expr();
      if (!accept(')')) fail("expected ')'");
      return r;
    }
    if (c == '-') {
      ++pos_;
      return -factor();
    }
    fail("unexpected character");
  }

  std::string_view text_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

}  // namespace

RatFunc parse_expr(std::string_view text, std::span<const std::string> vars) {
  return Parser(text, vars).parse();
}

// ------------------------------------------------------------- linear algebra

Matrix identity_matrix(std::size_t n) {
  Matrix m(n, std::vector<RatFunc>(n));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = RatFunc(1);
  return m;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
  std::size_t rows = a.size(), inner = b.size(), cols = b.empty() ? 0 : b[0].size();
  Matrix r(rows, std::vector<RatFunc>(cols));
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t k = 0; k < inner; ++k) {
      if (a[i][k].is_zero()) continue;
      for (std::size_t j = 0; j < cols; ++j) r[i][j] += a[i][k] * b[k][j];
    }
  return r;
}

namespace {

// Bareiss elimination on the augmented rows. Returns the sign of the row
// permutation, or 0 if the leading square block is singular.
int bareiss(Matrix& a, std::size_t n) {
  int sign = 1;
  RatFunc prev(1);
  std::size_t width = a.empty() ? 0 : a[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && a[p][k].is_zero()) ++p;
    if (p == n) return 0;
    if (p != k) {
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < width; ++j) a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev;
      a[i][k] = RatFunc();
    }
    prev = a[k][k];
  }
  return sign;
}

}  // namespace

RatFunc determinant(const Matrix& m) {
  if (m.empty()) return RatFunc(1);
  Matrix a = m;
  int sign = bareiss(a, a.size());
  if (sign == 0) return RatFunc();
  return sign > 0 ? a.back().back() : -a.back().back();
}

std::optional<Matrix> inverse(const Matrix& m) {
  std::size_t n = m.size();
  Matrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (m[i].size() != n) throw InputError("inverse: matrix is not square");
    a[i] = m[i];
    for (std::size_t j = 0; j < n; ++j) a[i].push_back(RatFunc(i == j ? 1 : 0));
  }
  if (bareiss(a, n) == 0) return std::nullopt;
  Matrix x(n, std::vector<RatFunc>(n));
  for (std::size_t col = 0; col < n; ++col)
    for (std::size_t ii = n; ii-- > 0;) {
      RatFunc s = a[ii][n + col];
      for (std::size_t j = ii + 1; j < n; ++j) s -= a[ii][j] * x[j][col];
      x[ii][col] = s / a[ii][ii];
    }
  return x;
}

}  // namespace fman
