#include "fman/calculus.hpp"

namespace fman {

Vec zeros(int n) { return Vec(static_cast<std::size_t>(n)); }

Vec unit_vector(int n, int i) {
  Vec v = zeros(n);
  v.at(static_cast<std::size_t>(i)) = RatFunc(1);
  return v;
}

bool is_zero(const Vec& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

Vec& operator+=(Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InputError("vector size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Vec& operator-=(Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw InputError("vector size mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

Vec operator+(Vec a, const Vec& b) { return a += b; }
Vec operator-(Vec a, const Vec& b) { return a -= b; }

Vec operator-(Vec a) {
  for (auto& x : a) x = -x;
  return a;
}

Vec operator*(const RatFunc& f, Vec v) {
  for (auto& x : v) x *= f;
  return v;
}

RatFunc derivative(const Chart& chart, const Vec& X, const RatFunc& f) {
  RatFunc r;
  if (f.is_constant()) return r;
  for (int i = 0; i < chart.n(); ++i) {
    const RatFunc& xi = X[static_cast<std::size_t>(i)];
    if (!xi.is_zero()) r += xi * f.partial(chart.base_var(i));
  }
  return r;
}

Vec derivative(const Chart& chart, const Vec& X, const Vec& v) {
  Vec r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) r[i] = derivative(chart, X, v[i]);
  return r;
}

Vec bracket(const Chart& chart, const Vec& X, const Vec& Y) {
  return derivative(chart, X, Y) - derivative(chart, Y, X);
}

Vec apply21(const Table& t, const Vec& X, const Vec& Y) {
  int n = t.dims()[2];
  int m = t.dims()[0];
  Vec r = zeros(n);
  for (int i = 0; i < m; ++i) {
    if (X[static_cast<std::size_t>(i)].is_zero()) continue;
    for (int j = 0; j < m; ++j) {
      if (Y[static_cast<std::size_t>(j)].is_zero()) continue;
      RatFunc w = X[static_cast<std::size_t>(i)] * Y[static_cast<std::size_t>(j)];
      for (int a = 0; a < n; ++a) {
        const RatFunc& b = t.at({i, j, a});
        if (!b.is_zero()) r[static_cast<std::size_t>(a)] += w * b;
      }
    }
  }
  return r;
}

Table lie_derivative21(const Chart& chart, const Table& t, const Vec& X) {
  int n = chart.n();
  std::vector<Vec> dX(static_cast<std::size_t>(n));  // dX[m][a] = ∂_m X^a
  for (int m = 0; m < n; ++m) {
    dX[m] = zeros(n);
    for (int a = 0; a < n; ++a) dX[m][a] = X[static_cast<std::size_t>(a)].partial(chart.base_var(m));
  }
  Table r(t.dims());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int a = 0; a < n; ++a) {
        RatFunc v = derivative(chart, X, t.at({i, j, a}));
        for (int m = 0; m < n; ++m) {
          if (!dX[m][a].is_zero()) v -= t.at({i, j, m}) * dX[m][a];
          if (!dX[i][m].is_zero()) v += t.at({m, j, a}) * dX[i][m];
          if (!dX[j][m].is_zero()) v += t.at({i, m, a}) * dX[j][m];
        }
        r.at({i, j, a}) = v;
      }
  return r;
}

Vec lie_apply21(const Chart& chart, const Table& t, const Vec& U, const Vec& A, const Vec& B) {
  return bracket(chart, U, apply21(t, A, B)) - apply21(t, bracket(chart, U, A), B) - apply21(t, A, bracket(chart, U, B));
}

}  // namespace fman
