#include "fman/tensor.hpp"

#include <cctype>
#include <set>

namespace fman {

namespace {

bool valid_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

void require_same_chart(const TensorField& a, const TensorField& b, const char* op) {
  if (!(a.chart() == b.chart())) throw InputError(std::string(op) + ": chart mismatch");
}

void require_vector_field(const TensorField& X, const char* op) {
  if (X.p() != 0 || X.q() != 1) throw InputError(std::string(op) + ": expected a vector field");
}

std::string indices_to_string(const std::vector<int>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
  return s + ")";
}

}  // namespace

// ------------------------------------------------------------------- Chart

Chart::Chart(std::vector<std::string> base, std::vector<std::string> fiber)
    : base_(std::move(base)), fiber_(std::move(fiber)) {
  std::set<std::string> seen;
  for (const auto* group : {&base_, &fiber_})
    for (const auto& name : *group) {
      if (!valid_identifier(name)) throw InputError("chart: invalid variable name '" + name + "'");
      if (!seen.insert(name).second) throw InputError("chart: duplicate variable name '" + name + "'");
      ids_.push_back(VariableRegistry::intern(name));
    }
}

Chart Chart::standard(int n, int k, const std::string& fiber_prefix) {
  if (n < 0 || k < 0) throw InputError("chart: negative dimension");
  std::vector<std::string> base, fiber;
  for (int i = 1; i <= n; ++i) base.push_back("x" + std::to_string(i));
  for (int j = 1; j <= k; ++j) fiber.push_back(fiber_prefix + std::to_string(j));
  return Chart(std::move(base), std::move(fiber));
}

std::vector<std::string> Chart::all_names() const {
  auto names = base_;
  names.insert(names.end(), fiber_.begin(), fiber_.end());
  return names;
}

bool Chart::is_base_only(const RatFunc& f) const {
  for (int j = 0; j < k(); ++j)
    if (f.contains(fiber_var(j))) return false;
  return true;
}

// ------------------------------------------------------------------- Table

Table::Table(std::vector<int> dims) : dims_(std::move(dims)) {
  std::size_t n = 1;
  for (int d : dims_) {
    if (d < 0) throw InputError("table: negative dimension");
    n *= static_cast<std::size_t>(d);
  }
  data_.assign(n, RatFunc());
}

std::size_t Table::flat(std::initializer_list<int> idx) const {
  if (idx.size() != dims_.size()) throw std::out_of_range("table: wrong number of indices");
  std::size_t f = 0, k = 0;
  for (int i : idx) {
    if (i < 0 || i >= dims_[k]) throw std::out_of_range("table: index out of range");
    f = f * static_cast<std::size_t>(dims_[k++]) + static_cast<std::size_t>(i);
  }
  return f;
}

std::size_t Table::flat(const std::vector<int>& idx) const {
  if (idx.size() != dims_.size()) throw std::out_of_range("table: wrong number of indices");
  std::size_t f = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= dims_[k]) throw std::out_of_range("table: index out of range");
    f = f * static_cast<std::size_t>(dims_[k]) + static_cast<std::size_t>(idx[k]);
  }
  return f;
}

std::vector<int> Table::unflatten(std::size_t f) const {
  std::vector<int> idx(dims_.size());
  for (std::size_t k = dims_.size(); k-- > 0;) {
    idx[k] = static_cast<int>(f % static_cast<std::size_t>(dims_[k]));
    f /= static_cast<std::size_t>(dims_[k]);
  }
  return idx;
}

bool Table::is_zero() const {
  for (const auto& v : data_)
    if (!v.is_zero()) return false;
  return true;
}

Table Table::operator-(const Table& o) const {
  if (dims_ != o.dims_) throw InputError("table: dimension mismatch");
  Table r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] -= o.data_[i];
  return r;
}

Table Table::operator+(const Table& o) const {
  if (dims_ != o.dims_) throw InputError("table: dimension mismatch");
  Table r = *this;
  for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] += o.data_[i];
  return r;
}

// ------------------------------------------------------------- TensorField

TensorField::TensorField(Chart chart, int p, int q) : chart_(std::move(chart)), p_(p), q_(q) {
  if (p < 0 || q < 0 || q > 1) throw InputError("tensor: valence must satisfy p >= 0, q in {0,1}");
  coeffs_.assign(ipow(static_cast<std::size_t>(chart_.dim()), p + q), RatFunc());
}

TensorField TensorField::vector_field(const Chart& chart, const std::vector<RatFunc>& components) {
  if (static_cast<int>(components.size()) != chart.dim())
    throw InputError("vector field: expected " + std::to_string(chart.dim()) + " components");
  TensorField t(chart, 0, 1);
  t.coeffs_ = components;
  return t;
}

TensorField TensorField::coordinate_field(const Chart& chart, int i) {
  TensorField t(chart, 0, 1);
  t.at({}, i) = RatFunc(1);
  return t;
}

TensorField TensorField::differential(const Chart& chart, int i) {
  TensorField t(chart, 1, 0);
  t.at({i}) = RatFunc(1);
  return t;
}

std::size_t TensorField::flat(const std::vector<int>& lower, int upper) const {
  if (static_cast<int>(lower.size()) != p_) throw std::out_of_range("tensor: wrong number of indices");
  int n = chart_.dim();
  std::size_t f = 0;
  for (int i : lower) {
    if (i < 0 || i >= n) throw std::out_of_range("tensor: index out of range");
    f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  }
  if (q_ == 1) {
    if (upper < 0 || upper >= n) throw std::out_of_range("tensor: index out of range");
    f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(upper);
  }
  return f;
}

RatFunc& TensorField::at(const std::vector<int>& lower, int upper) { return coeffs_[flat(lower, upper)]; }

const RatFunc& TensorField::at(const std::vector<int>& lower, int upper) const {
  return coeffs_[flat(lower, upper)];
}

std::pair<std::vector<int>, int> TensorField::index(std::size_t f) const {
  auto n = static_cast<std::size_t>(chart_.dim());
  int upper = 0;
  if (q_ == 1) {
    upper = static_cast<int>(f % n);
    f /= n;
  }
  std::vector<int> lower(static_cast<std::size_t>(p_));
  for (int r = p_; r-- > 0;) {
    lower[static_cast<std::size_t>(r)] = static_cast<int>(f % n);
    f /= n;
  }
  return {lower, upper};
}

std::vector<RatFunc> TensorField::components() const {
  if (p_ != 0 || q_ != 1) throw InputError("components: not a vector field");
  return coeffs_;
}

bool TensorField::is_zero() const {
  for (const auto& c : coeffs_)
    if (!c.is_zero()) return false;
  return true;
}

TensorField& TensorField::operator+=(const TensorField& o) {
  require_same_chart(*this, o, "add");
  if (p_ != o.p_ || q_ != o.q_) throw InputError("add: valence mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  require_same_chart(*this, o, "subtract");
  if (p_ != o.p_ || q_ != o.q_) throw InputError("subtract: valence mismatch");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
  return *this;
}

TensorField operator*(const RatFunc& f, TensorField t) {
  for (auto& c : t.coeffs_) c *= f;
  return t;
}

std::string TensorField::to_string() const {
  auto names = chart_.all_names();
  std::string out;
  for (std::size_t f = 0; f < coeffs_.size(); ++f) {
    if (coeffs_[f].is_zero()) continue;
    auto [lower, upper] = index(f);
    if (!out.empty()) out += " + ";
    out += "(" + coeffs_[f].to_string() + ")";
    for (int i : lower) out += " d" + names[static_cast<std::size_t>(i)];
    if (q_ == 1) out += " d/d" + names[static_cast<std::size_t>(upper)];
  }
  return out.empty() ? "0" : out;
}

// ----------------------------------------------------------------- Section

Section::Section(Chart c, std::vector<RatFunc> comps) : chart(std::move(c)), components(std::move(comps)) {
  if (static_cast<int>(components.size()) != chart.k())
    throw InputError("section: expected " + std::to_string(chart.k()) + " components");
  for (const auto& f : components)
    if (!chart.is_base_only(f)) throw InputError("section: component depends on a fiber coordinate");
}

Section Section::frame(const Chart& chart, int j) {
  std::vector<RatFunc> comps(static_cast<std::size_t>(chart.k()));
  comps.at(static_cast<std::size_t>(j)) = RatFunc(1);
  return Section(chart, std::move(comps));
}

// -------------------------------------------------------------- operations

TensorField lie_derivative(const TensorField& X, const TensorField& T) {
  require_vector_field(X, "lie_derivative");
  require_same_chart(X, T, "lie_derivative");
  const Chart& chart = X.chart();
  int N = chart.dim();
  // dX[m][a] = ∂_m X^a
  std::vector<std::vector<RatFunc>> dX(static_cast<std::size_t>(N), std::vector<RatFunc>(static_cast<std::size_t>(N)));
  bool constant = true;
  for (int m = 0; m < N; ++m)
    for (int a = 0; a < N; ++a) {
      dX[m][a] = X[static_cast<std::size_t>(a)].partial(chart.var(m));
      if (!dX[m][a].is_zero()) constant = false;
    }
  TensorField R(chart, T.p(), T.q());
  for (std::size_t f = 0; f < T.size(); ++f) {
    auto [lower, upper] = T.index(f);
    RatFunc v;
    for (int m = 0; m < N; ++m) {
      const RatFunc& xm = X[static_cast<std::size_t>(m)];
      if (!xm.is_zero() && !T[f].is_zero()) v += xm * T[f].partial(chart.var(m));
    }
    if (!constant) {
      if (T.q() == 1)
        for (int m = 0; m < N; ++m) {
          const RatFunc& d = dX[static_cast<std::size_t>(m)][static_cast<std::size_t>(upper)];
          if (!d.is_zero()) {
            const RatFunc& t = T.at(lower, m);
            if (!t.is_zero()) v -= t * d;
          }
        }
      for (int r = 0; r < T.p(); ++r) {
        auto idx = lower;
        int slot = lower[static_cast<std::size_t>(r)];
        for (int m = 0; m < N; ++m) {
          const RatFunc& d = dX[static_cast<std::size_t>(slot)][static_cast<std::size_t>(m)];
          if (d.is_zero()) continue;
          idx[static_cast<std::size_t>(r)] = m;
          const RatFunc& t = T.at(idx, upper);
          if (!t.is_zero()) v += t * d;
        }
      }
    }
    R[f] = std::move(v);
  }
  return R;
}

TensorField lie_bracket(const TensorField& X, const TensorField& Y) {
  require_vector_field(Y, "lie_bracket");
  return lie_derivative(X, Y);
}

TensorField contract(const TensorField& T, int slot, const TensorField& S) {
  require_vector_field(S, "contract");
  require_same_chart(T, S, "contract");
  if (slot < 0 || slot >= T.p()) throw std::out_of_range("contract: slot out of range");
  int N = T.chart().dim();
  TensorField R(T.chart(), T.p() - 1, T.q());
  for (std::size_t f = 0; f < R.size(); ++f) {
    auto [lower, upper] = R.index(f);
    std::vector<int> idx = lower;
    idx.insert(idx.begin() + slot, 0);
    RatFunc v;
    for (int m = 0; m < N; ++m) {
      const RatFunc& s = S[static_cast<std::size_t>(m)];
      if (s.is_zero()) continue;
      idx[static_cast<std::size_t>(slot)] = m;
      const RatFunc& t = T.at(idx, upper);
      if (!t.is_zero()) v += s * t;
    }
    R[f] = std::move(v);
  }
  return R;
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
  require_same_chart(a, b, "tensor_product");
  if (a.q() + b.q() > 1) throw InputError("tensor_product: result would have q > 1");
  TensorField R(a.chart(), a.p() + b.p(), a.q() + b.q());
  for (std::size_t f = 0; f < R.size(); ++f) {
    auto [lower, upper] = R.index(f);
    std::vector<int> la(lower.begin(), lower.begin() + a.p());
    std::vector<int> lb(lower.begin() + a.p(), lower.end());
    const RatFunc& x = a.at(la, a.q() ? upper : 0);
    if (x.is_zero()) continue;
    R[f] = x * b.at(lb, b.q() ? upper : 0);
  }
  return R;
}

namespace {

// 1: every component matches t^{1-q}, 2: every component matches t^{-q}.
unsigned scaling_flags(const TensorField& T) {
  const Chart& chart = T.chart();
  VarId t = VariableRegistry::intern("%t");
  Poly tp = Poly::variable(t);
  RatFunc tr(tp);
  unsigned flags = 3;
  for (std::size_t f = 0; f < T.size() && flags; ++f) {
    if (T[f].is_zero()) continue;
    auto [lower, upper] = T.index(f);
    int w = 0;
    for (int i : lower)
      if (chart.is_fiber_index(i)) ++w;
    if (T.q() == 1 && chart.is_fiber_index(upper)) --w;
    RatFunc c = T[f];
    for (int j = 0; j < chart.k(); ++j) c = c.substitute(chart.fiber_var(j), tp * Poly::variable(chart.fiber_var(j)));
    c *= tr.pow(w);
    if ((flags & 1U) && !(c == tr.pow(1 - T.q()) * T[f])) flags &= ~1U;
    if ((flags & 2U) && !(c == tr.pow(-T.q()) * T[f])) flags &= ~2U;
  }
  return flags;
}

}  // namespace

ScalingClass scaling_class(const TensorField& T) {
  unsigned flags = scaling_flags(T);
  if (flags & 1U) return ScalingClass::linear;
  if (flags & 2U) return ScalingClass::core;
  return ScalingClass::neither;
}

bool is_linear(const TensorField& T) { return (scaling_flags(T) & 1U) != 0; }

bool is_core(const TensorField& T) { return (scaling_flags(T) & 2U) != 0; }

TensorField vertical_lift(const Section& s) {
  TensorField R(s.chart, 0, 1);
  for (int j = 0; j < s.chart.k(); ++j) R.at({}, s.chart.n() + j) = s.components[static_cast<std::size_t>(j)];
  return R;
}

// ------------------------------------------------------ linear components

LeibnizViolation::LeibnizViolation(int coordinate, int section, std::vector<int> slot, const std::string& detail)
    : InputError("Leibniz rule violated for f = x" + std::to_string(coordinate + 1) + ", s_" +
                 std::to_string(section + 1) + " at component " + indices_to_string(slot) + ": " + detail),
      coordinate_(coordinate),
      section_(section),
      slot_(std::move(slot)) {}

LinearComponents LinearComponents::zero(const Chart& chart, int p) {
  if (p < 1 || p > 4) throw InputError("linear components: p must be in 1..4");
  LinearComponents c;
  c.chart = chart;
  c.p = p;
  std::vector<int> base(static_cast<std::size_t>(p), chart.n());
  auto d = base;
  d.push_back(chart.k());
  d.push_back(chart.k());
  c.D = Table(d);
  for (int r = 0; r < p; ++r) {
    std::vector<int> dl(static_cast<std::size_t>(p - 1), chart.n());
    dl.push_back(chart.k());
    dl.push_back(chart.k());
    c.l.emplace_back(dl);
  }
  auto b = base;
  b.push_back(chart.n());
  c.basic = Table(b);
  return c;
}

namespace {

// All p-tuples of base indices.
std::vector<std::vector<int>> base_tuples(int n, int p) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(p), 0);
  if (n == 0 && p > 0) return out;
  for (;;) {
    out.push_back(cur);
    int r = p - 1;
    while (r >= 0 && ++cur[static_cast<std::size_t>(r)] == n) cur[static_cast<std::size_t>(r--)] = 0;
    if (r < 0) break;
  }
  return out;
}

std::vector<int> with(std::vector<int> v, std::initializer_list<int> extra) {
  v.insert(v.end(), extra);
  return v;
}

}  // namespace

LinearComponents extract_components(const TensorField& T) {
  if (T.q() != 1 || T.p() < 1 || T.p() > 4) throw InputError("extract_components: expected a (p,1)-tensor with 1 <= p <= 4");
  if (!is_linear(T)) throw InputError("extract_components: tensor is not fiberwise linear");
  const Chart& chart = T.chart();
  int n = chart.n(), k = chart.k(), p = T.p();
  LinearComponents c = LinearComponents::zero(chart, p);
  auto tuples = base_tuples(n, p);
  auto shorter = base_tuples(n, p - 1);
  for (int j = 0; j < k; ++j) {
    TensorField lift = vertical_lift(Section::frame(chart, j));
    TensorField L = lie_derivative(lift, T);
    for (const auto& x : tuples)
      for (int i = 0; i < k; ++i) c.D.at(with(x, {j, i})) = L.at(x, n + i);
    for (int r = 0; r < p; ++r) {
      TensorField C = contract(T, r, lift);
      for (const auto& y : shorter)
        for (int i = 0; i < k; ++i) c.l[static_cast<std::size_t>(r)].at(with(y, {j, i})) = C.at(y, n + i);
    }
  }
  for (const auto& x : tuples)
    for (int a = 0; a < n; ++a) c.basic.at(with(x, {a})) = T.at(x, a);
  return c;
}

TensorField assemble(const LinearComponents& c) {
  const Chart& chart = c.chart;
  int n = chart.n(), k = chart.k(), p = c.p;
  LinearComponents shape = LinearComponents::zero(chart, p);
  if (c.D.dims() != shape.D.dims() || c.basic.dims() != shape.basic.dims() || c.l.size() != shape.l.size())
    throw InputError("assemble: table dimensions inconsistent with chart");
  for (std::size_t r = 0; r < c.l.size(); ++r)
    if (c.l[r].dims() != shape.l[r].dims()) throw InputError("assemble: l-table dimensions inconsistent with chart");

  TensorField T(chart, p, 1);
  auto tuples = base_tuples(n, p);
  auto shorter = base_tuples(n, p - 1);
  for (const auto& x : tuples) {
    for (int i = 0; i < k; ++i) {
      RatFunc v;
      for (int j = 0; j < k; ++j) {
        const RatFunc& d = c.D.at(with(x, {j, i}));
        if (!d.is_zero()) v += RatFunc::variable(chart.fiber_var(j)) * d;
      }
      T.at(x, n + i) = v;
    }
    for (int a = 0; a < n; ++a) T.at(x, a) = c.basic.at(with(x, {a}));
  }
  for (int r = 0; r < p; ++r)
    for (const auto& y : shorter)
      for (int j = 0; j < k; ++j) {
        auto idx = y;
        idx.insert(idx.begin() + r, n + j);
        for (int i = 0; i < k; ++i) T.at(idx, n + i) = c.l[static_cast<std::size_t>(r)].at(with(y, {j, i}));
      }

  // Leibniz rule on f = x_a: L_{(x_a s_j)^} T must be the core tensor
  // x_a D s_j + dx_a ⊗^ l s_j - <dx_a, T^M> ⊗ s_j.
  for (int a = 0; a < n; ++a)
    for (int j = 0; j < k; ++j) {
      std::vector<RatFunc> comps(static_cast<std::size_t>(k));
      comps[static_cast<std::size_t>(j)] = RatFunc::variable(chart.base_var(a));
      TensorField L = lie_derivative(vertical_lift(Section(chart, comps)), T);
      TensorField expected(chart, p, 1);
      for (const auto& x : tuples)
        for (int i = 0; i < k; ++i) {
          RatFunc v = RatFunc::variable(chart.base_var(a)) * c.D.at(with(x, {j, i}));
          for (int r = 0; r < p; ++r) {
            if (x[static_cast<std::size_t>(r)] != a) continue;
            auto y = x;
            y.erase(y.begin() + r);
            v += c.l[static_cast<std::size_t>(r)].at(with(y, {j, i}));
          }
          if (i == j) v -= c.basic.at(with(x, {a}));
          expected.at(x, n + i) = v;
        }
      for (std::size_t f = 0; f < L.size(); ++f)
        if (!(L[f] == expected[f])) {
          auto [lower, upper] = L.index(f);
          auto slot = lower;
          slot.push_back(upper);
          throw LeibnizViolation(a, j, slot, "got " + L[f].to_string() + ", expected " + expected[f].to_string());
        }
    }
  return T;
}

}  // namespace fman
