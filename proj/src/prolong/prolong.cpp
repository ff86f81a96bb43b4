#include "fman/prolong.hpp"

#include <memory>

namespace fman {

std::string to_string(ProlongationKind k) {
  switch (k) {
    case ProlongationKind::tangent: return "tangent";
    case ProlongationKind::cotangent: return "cotangent";
    case ProlongationKind::generalized: return "generalized";
  }
  return "?";
}

namespace {

void require_verified(const BaseFManifold& base) {
  if (!base.verify().passed()) throw PreconditionError("prolongation requires a verified base F-manifold");
}

void require_flat(const BaseFManifold& base, const Connection& nabla) {
  if (!check_flat_f(base, nabla).passed()) throw PreconditionError("prolongation requires a flat F-manifold structure");
}

}  // namespace

Chart tangent_chart(const Chart& base) {
  std::vector<std::string> fiber;
  for (int i = 0; i < base.n(); ++i) fiber.push_back("xi" + std::to_string(i + 1));
  return base.base_chart().with_fiber(std::move(fiber));
}

LinearVectorField tangent_lift(const Chart& chart, const Vec& X) {
  int n = chart.n();
  if (chart.k() != n || static_cast<int>(X.size()) != n) throw InputError("tangent lift needs a field on M and the chart of TM");
  LinearVectorField r = LinearVectorField::zero(chart);
  r.beta = X;
  for (int m = 0; m < n; ++m)
    for (int j = 0; j < n; ++j) r.lambda.at({m, j}) = X[m].partial(chart.base_var(j));
  r.validate();
  return r;
}

ProlongedStructure tangent_prolongation(const BaseFManifold& base) {
  require_verified(base);
  int n = base.n();
  Chart ch = tangent_chart(base.chart);
  MultComponents c = MultComponents::zero(ch);
  c.star = base.star;
  for (int y = 0; y < n; ++y)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) c.l.at({y, j, i}) = base.star.at({j, y, i});
  for (int j = 0; j < n; ++j) {
    Table lie = lie_derivative21(base.chart, base.star, unit_vector(n, j));
    for (int y = 0; y < n; ++y)
      for (int z = 0; z < n; ++z)
        for (int i = 0; i < n; ++i) c.D.at({y, z, j, i}) = lie.at({y, z, i});
  }
  return ProlongedStructure{ProlongationKind::tangent, c, tangent_lift(ch, base.unit), base, std::nullopt};
}

ProlongedStructure cotangent_prolongation(const BaseFManifold& base, const Connection& nabla) {
  require_flat(base, nabla);
  ProlongedStructure t = tangent_prolongation(base);
  DualData d = dualize(t.components, t.unit, nabla);
  return ProlongedStructure{ProlongationKind::cotangent, d.c, d.e, base, nabla};
}

ProlongedStructure generalized_prolongation(const BaseFManifold& base, const Connection& nabla) {
  require_flat(base, nabla);
  ProlongedStructure t = tangent_prolongation(base);
  DualData d = dualize(t.components, t.unit, nabla);
  return ProlongedStructure{ProlongationKind::generalized, direct_sum(t.components, d.c), direct_sum(t.unit, d.e), base,
                            nabla};
}

namespace {

Chart sum_chart(const Chart& a, const Chart& b) {
  if (a.base_names() != b.base_names()) throw InputError("direct sum needs a common base chart");
  std::vector<std::string> fiber = a.fiber_names();
  fiber.insert(fiber.end(), b.fiber_names().begin(), b.fiber_names().end());
  return a.with_fiber(std::move(fiber));
}

}  // namespace

MultComponents direct_sum(const MultComponents& a, const MultComponents& b) {
  a.validate();
  b.validate();
  Chart ch = sum_chart(a.chart, b.chart);
  if (!(a.star == b.star)) throw InputError("direct sum needs equal basic components");
  int n = a.n(), ka = a.k(), kb = b.k();
  MultComponents r = MultComponents::zero(ch);
  r.star = a.star;
  for (int x = 0; x < n; ++x) {
    for (int j = 0; j < ka; ++j)
      for (int i = 0; i < ka; ++i) r.l.at({x, j, i}) = a.l.at({x, j, i});
    for (int j = 0; j < kb; ++j)
      for (int i = 0; i < kb; ++i) r.l.at({x, ka + j, ka + i}) = b.l.at({x, j, i});
    for (int y = 0; y < n; ++y) {
      for (int j = 0; j < ka; ++j)
        for (int i = 0; i < ka; ++i) r.D.at({x, y, j, i}) = a.D.at({x, y, j, i});
      for (int j = 0; j < kb; ++j)
        for (int i = 0; i < kb; ++i) r.D.at({x, y, ka + j, ka + i}) = b.D.at({x, y, j, i});
    }
  }
  return r;
}

LinearVectorField direct_sum(const LinearVectorField& a, const LinearVectorField& b) {
  a.validate();
  b.validate();
  Chart ch = sum_chart(a.chart, b.chart);
  if (a.beta != b.beta) throw InputError("direct sum of linear vector fields needs equal base parts");
  int ka = a.chart.k(), kb = b.chart.k();
  LinearVectorField r = LinearVectorField::zero(ch);
  r.beta = a.beta;
  for (int j = 0; j < ka; ++j)
    for (int i = 0; i < ka; ++i) r.lambda.at({j, i}) = a.lambda.at({j, i});
  for (int j = 0; j < kb; ++j)
    for (int i = 0; i < kb; ++i) r.lambda.at({ka + j, ka + i}) = b.lambda.at({j, i});
  return r;
}

namespace {

Matrix checked_inverse(const Chart& chart, const Matrix& I) {
  int k = chart.k();
  if (static_cast<int>(I.size()) != k) throw InputError("fiber isomorphism has wrong size");
  for (const auto& row : I) {
    if (static_cast<int>(row.size()) != k) throw InputError("fiber isomorphism has wrong size");
    for (const auto& v : row)
      if (!chart.is_base_only(v)) throw InputError("fiber isomorphism must depend on base coordinates only");
  }
  auto inv = inverse(I);
  if (!inv) throw InputError("fiber isomorphism is singular");
  return *inv;
}

Vec column(const Matrix& m, int j) {
  Vec v(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) v[i] = m[i][j];
  return v;
}

Vec mat_apply(const Matrix& m, const Vec& v) {
  Vec r(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!m[i][j].is_zero() && !v[j].is_zero()) r[i] += m[i][j] * v[j];
  return r;
}

}  // namespace

MultComponents conjugate(const MultComponents& c, const Matrix& I) {
  c.validate();
  Matrix inv = checked_inverse(c.chart, I);
  int n = c.n(), k = c.k();
  MultComponents r = MultComponents::zero(c.chart);
  r.star = c.star;
  for (int j = 0; j < k; ++j) {
    Vec pre = column(inv, j);  // I^{-1} s_j
    for (int x = 0; x < n; ++x) {
      Vec X = unit_vector(n, x);
      Vec lv = mat_apply(I, c.l_apply(X, pre));
      for (int i = 0; i < k; ++i) r.l.at({x, j, i}) = lv[i];
      for (int y = 0; y < n; ++y) {
        Vec dv = mat_apply(I, c.D_apply(X, unit_vector(n, y), pre));
        for (int i = 0; i < k; ++i) r.D.at({x, y, j, i}) = dv[i];
      }
    }
  }
  return r;
}

LinearVectorField conjugate(const LinearVectorField& X, const Matrix& I) {
  X.validate();
  Matrix inv = checked_inverse(X.chart, I);
  int k = X.chart.k();
  LinearVectorField r = LinearVectorField::zero(X.chart);
  r.beta = X.beta;
  for (int j = 0; j < k; ++j) {
    Vec d = mat_apply(I, X.derivation(column(inv, j)));
    for (int m = 0; m < k; ++m) r.lambda.at({m, j}) = -d[m];
  }
  return r;
}

IdentityCheck five_field_identity(const Chart& chart, const Table& star) {
  Chart base = chart.base_chart();
  int n = base.n();
  auto t = std::make_shared<Table>(star);
  return IdentityCheck{
      "five-field-identity",
      "five-field identity for L_W(*) on an F-manifold",
      {"X", "Y", "Z", "V", "W"},
      {n, n, n, n, n},
      [base, t, n](const std::vector<int>& i) {
        const Table& s = *t;
        Vec X = unit_vector(n, i[0]), Y = unit_vector(n, i[1]), Z = unit_vector(n, i[2]), V = unit_vector(n, i[3]),
            W = unit_vector(n, i[4]);
        auto L = [&](const Vec& U, const Vec& A, const Vec& B) { return lie_apply21(base, s, U, A, B); };
        auto P = [&](const Vec& A, const Vec& B) { return apply21(s, A, B); };
        auto br = [&](const Vec& A, const Vec& B) { return bracket(base, A, B); };
        Vec xy = P(X, Y);
        return L(W, br(xy, Z), V) + L(W, br(xy, V), Z) + L(W, L(Y, Z, V), X) + L(W, L(X, Z, V), Y) -
               P(X, L(W, br(Y, V), Z) + L(W, br(Y, Z), V)) - P(Y, L(W, br(X, V), Z) + L(W, br(X, Z), V)) +
               L(L(W, Z, V), X, Y) - L(L(W, X, Y), Z, V);
      }};
}

Report check_five_field_identity(const BaseFManifold& base) {
  require_verified(base);
  Report r;
  r.title = "five-field identity";
  r.records.push_back(run_identities("five-field-identity", "identity on all frame tuples",
                                     {five_field_identity(base.chart, base.star)}));
  return r;
}

}  // namespace fman
