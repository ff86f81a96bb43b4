#include <gtest/gtest.h>

#include "../support/random.hpp"
#include "fman/duality.hpp"

using namespace fman;

namespace {

RatFunc P(const Chart& c, const std::string& s) { return parse_expr(s, c.all_names()); }

Chart line_chart() { return Chart({"x"}, {"xi"}); }
Chart plane_chart() { return Chart({"x1", "x2"}, {"xi"}); }

MultComponents line_example() {
  auto c = MultComponents::zero(line_chart());
  c.star.at({0, 0, 0}) = RatFunc(1);
  c.l.at({0, 0, 0}) = RatFunc(1);
  return c;
}

MultComponents plane_example() {
  Chart ch = plane_chart();
  auto c = MultComponents::zero(ch);
  c.star.at({0, 0, 0}) = RatFunc(1);
  c.star.at({0, 1, 1}) = RatFunc(1);
  c.star.at({1, 0, 1}) = RatFunc(1);
  c.l.at({0, 0, 0}) = RatFunc(1);
  c.D.at({1, 1, 0, 0}) = P(ch, "x2");
  return c;
}

LinearVectorField field(const Chart& ch, std::vector<std::string> beta, std::vector<std::string> lambda = {}) {
  auto f = LinearVectorField::zero(ch);
  for (std::size_t i = 0; i < beta.size(); ++i) f.beta[i] = P(ch, beta[i]);
  for (std::size_t i = 0; i < lambda.size(); ++i) f.lambda[i] = P(ch, lambda[i]);
  return f;
}

Connection connection(const Chart& ch, std::vector<std::pair<std::vector<int>, std::string>> entries) {
  Connection c = Connection::zero(ch);
  for (const auto& [idx, s] : entries) c.gamma.at(idx) = P(ch, s);
  return c;
}

Connection random_connection(testkit::RandomPoly& gen, const Chart& ch, unsigned degree) {
  Connection c = Connection::zero(ch);
  for (std::size_t i = 0; i < c.gamma.size(); ++i) c.gamma[i] = RatFunc(gen.poly(ch.base_names(), degree, 2));
  return c;
}

// One-dimensional flat instance: ē = f ∂x, ∂x*∂x = (1/f) ∂x, Γ = -f'/f, l = (1/f) id and D
// fixed by the unit condition from a random fiber part Λ of e.
struct FlatLineInstance {
  MultComponents c;
  LinearVectorField e;
  Connection nabla;
};

FlatLineInstance random_flat_line(testkit::RandomPoly& gen, int k) {
  Chart ch = Chart::standard(1, k);
  Poly fp;
  do fp = gen.poly({"x1"}, 1, 2) + Poly(gen.integer(1, 3));
  while (fp.is_zero());
  RatFunc f(fp);
  RatFunc x = RatFunc::variable(ch.base_var(0));
  FlatLineInstance r{MultComponents::zero(ch), LinearVectorField::zero(ch), Connection::zero(ch)};
  r.c.star.at({0, 0, 0}) = f.inverse();
  r.e.beta[0] = f;
  r.nabla.gamma.at({0, 0, 0}) = -f.partial(ch.base_var(0)) * f.inverse();
  for (int j = 0; j < k; ++j) r.c.l.at({0, j, j}) = f.inverse();
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) {
      RatFunc lam(gen.poly({"x1"}, 1, 2));
      r.e.lambda.at({i, j}) = lam;
      r.c.D.at({0, 0, j, i}) = -lam * f.inverse().pow(2);
    }
  return r;
}

}  // namespace

// ------------------------------------------------------------ connections

TEST(Connection, ZeroConnectionInvariants) {
  Chart ch = Chart({"x1", "x2"}, {});
  Connection z = Connection::zero(ch);
  EXPECT_TRUE(torsion(z).is_zero());
  EXPECT_TRUE(curvature(z).is_zero());
  EXPECT_EQ(symmetric_bracket(z, unit_vector(2, 0), unit_vector(2, 1)), zeros(2));
}

TEST(Connection, TorsionOfAsymmetricCoefficients) {
  Chart ch = Chart({"x1", "x2"}, {});
  Connection c = connection(ch, {{{0, 1, 0}, "x2"}});
  Table t = torsion(c);
  EXPECT_EQ(t.at({0, 1, 0}), P(ch, "x2"));
  EXPECT_EQ(t.at({1, 0, 0}), P(ch, "-x2"));
  EXPECT_EQ(torsion(c, unit_vector(2, 0), unit_vector(2, 1)), (Vec{P(ch, "x2"), RatFunc(0)}));
}

TEST(Connection, CurvatureMatchesCoordinateFormula) {
  testkit::RandomPoly gen(testkit::seed());
  Chart ch = Chart({"x1", "x2"}, {});
  Connection c = random_connection(gen, ch, 2);
  Table R = curvature(c);
  const auto& G = c.gamma;
  int n = 2;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          RatFunc v = G.at({j, l, k}).partial(ch.base_var(i)) - G.at({i, l, k}).partial(ch.base_var(j));
          for (int m = 0; m < n; ++m) v += G.at({j, l, m}) * G.at({i, m, k}) - G.at({i, l, m}) * G.at({j, m, k});
          EXPECT_EQ(R.at({i, j, l, k}), v);
        }
}

TEST(Connection, SymmetricBracketExpansion) {
  Chart ch = Chart({"x1", "x2"}, {});
  for (int s = 0; s < 10; ++s) {
    testkit::RandomPoly gen(testkit::seed() + static_cast<std::uint64_t>(s));
    Connection c = random_connection(gen, ch, 1);
    RatFunc f(gen.poly(ch.base_names(), 2, 3));
    Vec X{RatFunc(gen.poly(ch.base_names(), 2, 2)), RatFunc(gen.poly(ch.base_names(), 2, 2))};
    Vec Y{RatFunc(gen.poly(ch.base_names(), 2, 2)), RatFunc(gen.poly(ch.base_names(), 2, 2))};
    EXPECT_EQ(symmetric_bracket(c, f * X, Y), f * symmetric_bracket(c, X, Y) + derivative(ch, Y, f) * X);
    EXPECT_EQ(symmetric_bracket(c, X, Y), symmetric_bracket(c, Y, X));
  }
}

TEST(Connection, RejectsWrongDimensions) {
  Chart ch = Chart({"x1", "x2"}, {});
  EXPECT_THROW(Connection(ch, Table({1, 1, 1})), InputError);
}

// ------------------------------------------------------------ flat F-manifolds

TEST(FlatF, PlaneBaseWithZeroConnection) {
  BaseFManifold base(plane_chart(), plane_example().star, Vec{RatFunc(1), RatFunc(0)});
  Report r = check_flat_f(base, Connection::zero(base.chart));
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.records.size(), 4u);
}

TEST(FlatF, NonParallelUnit) {
  BaseFManifold base(plane_chart(), plane_example().star, Vec{RatFunc(1), RatFunc(0)});
  Connection c = connection(base.chart, {{{0, 0, 0}, "x1"}});
  Report r = check_flat_f(base, c);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.find("unit-parallel")->verdict, Verdict::fail);
  EXPECT_EQ(r.find("unit-parallel")->residual, "[x1, 0]");
  EXPECT_EQ(r.find("torsion-free")->verdict, Verdict::pass);
  // ∇_{∂x1} ∂x1 = x1 ∂x1
  EXPECT_EQ(c.covariant(unit_vector(2, 0), unit_vector(2, 0)), (Vec{P(base.chart, "x1"), RatFunc(0)}));
}

TEST(FlatF, CanonicalRegularModelWithEuler) {
  Chart ch = Chart({"t0", "t1"}, {});
  Table star({2, 2, 2});
  star.at({0, 0, 0}) = RatFunc(1);
  star.at({0, 1, 1}) = RatFunc(1);
  star.at({1, 0, 1}) = RatFunc(1);
  BaseFManifold base(ch, star, unit_vector(2, 0));
  Vec E{P(ch, "t0+3"), P(ch, "t1+1")};
  Report r = check_flat_f(base, Connection::zero(ch), E);
  EXPECT_TRUE(r.passed());
  EXPECT_NE(r.find("euler-flat"), nullptr);
  Vec bad{P(ch, "t0^2"), P(ch, "t1+1")};
  EXPECT_FALSE(check_flat_f(base, Connection::zero(ch), bad).passed());
}

TEST(FlatF, RequiresVerifiedBase) {
  Chart ch = Chart({"x"}, {});
  BaseFManifold base(ch, Table({1, 1, 1}), Vec{RatFunc(1)});
  EXPECT_THROW(check_flat_f(base, Connection::zero(ch)), PreconditionError);
}

// ------------------------------------------------------------ dualize

TEST(Dualize, ChartRenaming) {
  Chart ch = Chart({"x1"}, {"xi1", "xi2"});
  Chart d = dual_chart(ch);
  EXPECT_EQ(d.fiber_names(), (std::vector<std::string>{"mu1", "mu2"}));
  EXPECT_EQ(dual_chart(d), ch);
  Chart odd = Chart({"x"}, {"v"});
  EXPECT_EQ(dual_chart(odd).fiber_names(), std::vector<std::string>{"dual_v"});
  EXPECT_EQ(dual_chart(dual_chart(odd)), odd);
}

TEST(Dualize, ZeroDAndLLeaveOnlyBracketPart) {
  // With l = 0 and D = 0 every D* frame entry vanishes: all terms carry l or D.
  Chart ch = plane_chart();
  auto c = MultComponents::zero(ch);
  c.star = plane_example().star;
  testkit::RandomPoly gen(testkit::seed());
  auto d = dualize(c, LinearVectorField::zero(ch), random_connection(gen, ch, 1));
  EXPECT_TRUE(d.c.D.is_zero());
  EXPECT_TRUE(d.c.l.is_zero());
  EXPECT_EQ(d.c.star, c.star);
}

TEST(Dualize, HandExpansionOnPlaneExample) {
  // l_{∂1} s = s, D_{∂2,∂2} s = x2 s, Γ^1_{12} = Γ^1_{21} = x1:
  // D*_{1,1} μ = 0, D*_{1,2} μ = -<∂1:∂2>^1 μ = -2 x1 μ, D*_{2,2} μ = -x2 μ.
  auto c = plane_example();
  Connection nabla = connection(c.chart, {{{0, 1, 0}, "x1"}, {{1, 0, 0}, "x1"}});
  auto d = dualize(c, field(c.chart, {"1", "0"}), nabla);
  EXPECT_TRUE(d.c.D.at({0, 0, 0, 0}).is_zero());
  EXPECT_EQ(d.c.D.at({0, 1, 0, 0}), P(c.chart, "-2*x1"));
  EXPECT_EQ(d.c.D.at({1, 0, 0, 0}), P(c.chart, "-2*x1"));
  EXPECT_EQ(d.c.D.at({1, 1, 0, 0}), P(c.chart, "-x2"));
  EXPECT_EQ(d.c.chart.fiber_names(), std::vector<std::string>{"mu"});
}

TEST(Dualize, InvolutionOnRandomData) {
  for (int s = 0; s < 10; ++s) {
    testkit::RandomPoly gen(testkit::seed() + 200 + static_cast<std::uint64_t>(s));
    Chart ch = s % 2 ? Chart::standard(2, 1) : Chart::standard(1, 2);
    auto c = MultComponents::zero(ch);
    for (auto* t : {&c.D, &c.l, &c.star})
      for (std::size_t i = 0; i < t->size(); ++i) (*t)[i] = RatFunc(gen.poly(ch.base_names(), 2, 2));
    auto e = LinearVectorField::zero(ch);
    for (auto& b : e.beta) b = RatFunc(gen.poly(ch.base_names(), 2, 2));
    for (std::size_t i = 0; i < e.lambda.size(); ++i) e.lambda[i] = RatFunc(gen.poly(ch.base_names(), 2, 2));
    Connection nabla = random_connection(gen, ch, 2);
    auto once = dualize(c, e, nabla);
    auto twice = dualize(once.c, once.e, nabla);
    EXPECT_EQ(twice.c, c) << "seed " << s;
    EXPECT_EQ(twice.e, e) << "seed " << s;
  }
}

TEST(Dualize, PairingCompatibility) {
  // (l*_X μ^j)(s_i) = μ^j(l_X s_i), also after assembling the dual tensor.
  testkit::RandomPoly gen(testkit::seed() + 7);
  Chart ch = Chart::standard(2, 2);
  auto c = MultComponents::zero(ch);
  for (std::size_t i = 0; i < c.l.size(); ++i) c.l[i] = RatFunc(gen.poly(ch.base_names(), 1, 2));
  auto d = dualize(c, LinearVectorField::zero(ch), Connection::zero(ch));
  MultComponents back = from_linear(extract_components(assemble(d.c)));
  for (int x = 0; x < 2; ++x)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        Vec lstar = back.l_apply(unit_vector(2, x), unit_vector(2, j));
        EXPECT_EQ(lstar[i], c.l_apply(unit_vector(2, x), unit_vector(2, i))[j]);
      }
}

TEST(Dualize, DualUnitDerivation) {
  // (Δ_{e*} μ)(s) = ē(μ(s)) - μ(Δ_e s) on frames.
  Chart ch = Chart::standard(1, 2);
  auto e = field(ch, {"x1"}, {"1", "x1", "2", "0"});
  auto d = dualize(e);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      RatFunc lhs = d.derivation(unit_vector(2, j))[i];
      RatFunc rhs = -e.derivation(unit_vector(2, i))[j];
      EXPECT_EQ(lhs, rhs);
    }
}

// ------------------------------------------------------------ duality conditions

TEST(DualityConditions, FlatBasePassesAndDualIsFManifold) {
  auto c = plane_example();
  auto e = field(c.chart, {"1", "0"});
  Connection nabla = Connection::zero(c.chart);
  Report r = check_duality_conditions(c, e, nabla);
  EXPECT_TRUE(r.passed());
  auto d = dualize(c, e, nabla);
  EXPECT_TRUE(check_fmanifold(d.c, d.e).passed());
}

TEST(DualityConditions, NonParallelUnitBreaksDualUnit) {
  auto c = line_example();
  auto e = field(c.chart, {"1"});
  Connection nabla = connection(c.chart, {{{0, 0, 0}, "1"}});
  Report r = check_duality_conditions(c, e, nabla);
  EXPECT_EQ(r.find("unit-duality")->verdict, Verdict::fail);
  EXPECT_EQ(r.find("dual-cross-check"), nullptr);
  auto d = dualize(c, e, nabla);
  Report db = check_fmanifold(d.c, d.e);
  EXPECT_EQ(db.find(kUnit)->verdict, Verdict::fail);
}

TEST(DualityConditions, EulerConditionOnLineExample) {
  auto c = line_example();
  auto e = field(c.chart, {"1"});
  auto E = field(c.chart, {"x+5"}, {"1"});
  Report r = check_duality_conditions(c, e, Connection::zero(c.chart), &E);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.find("euler-duality")->verdict, Verdict::pass);
  auto d = dualize(c, e, Connection::zero(c.chart));
  EXPECT_TRUE(check_euler(d.c, d.e, dualize(E)).passed());
}

TEST(DualityConditions, RequiresBattery) {
  auto c = line_example();
  EXPECT_THROW(check_duality_conditions(c, field(c.chart, {"1"}, {"1"}), Connection::zero(c.chart)), PreconditionError);
}

TEST(DualityConditions, RandomFlatLineInstances) {
  for (int s = 0; s < 10; ++s) {
    testkit::RandomPoly gen(testkit::seed() + 300 + static_cast<std::uint64_t>(s));
    auto inst = random_flat_line(gen, 1 + s % 2);
    ASSERT_TRUE(check_fmanifold(inst.c, inst.e).passed()) << "seed " << s;
    BaseFManifold base(inst.c.chart, inst.c.star, inst.e.beta);
    ASSERT_TRUE(check_flat_f(base, inst.nabla).passed()) << "seed " << s;
    Report r = check_duality_conditions(inst.c, inst.e, inst.nabla);
    EXPECT_TRUE(r.passed()) << "seed " << s;
    auto d = dualize(inst.c, inst.e, inst.nabla);
    EXPECT_TRUE(check_fmanifold(d.c, d.e).passed()) << "seed " << s;
  }
}

TEST(DualityConditions, AgreeWithDualBatteryForArbitraryConnections) {
  for (int s = 0; s < 10; ++s) {
    testkit::RandomPoly gen(testkit::seed() + 400 + static_cast<std::uint64_t>(s));
    auto c = s % 2 ? plane_example() : line_example();
    auto e = s % 2 ? field(c.chart, {"1", "0"}) : field(c.chart, {"1"});
    Connection nabla = random_connection(gen, c.chart, 1);
    Report r = check_duality_conditions(c, e, nabla);
    EXPECT_EQ(r.find("dual-cross-check"), nullptr) << "seed " << s << " " << r.records.back().note;
  }
}

// ------------------------------------------------------------ regular connection

TEST(RegularConnection, CanonicalModelGivesZero) {
  Chart ch = Chart({"t0", "t1"}, {});
  Table star({2, 2, 2});
  star.at({0, 0, 0}) = RatFunc(1);
  star.at({0, 1, 1}) = RatFunc(1);
  star.at({1, 0, 1}) = RatFunc(1);
  BaseFManifold base(ch, star, unit_vector(2, 0));
  for (const char* a : {"0", "3", "-1/2"}) {
    Vec E{P(ch, std::string("t0+") + a), P(ch, "t1+1")};
    Connection nabla = regular_connection(base, E);
    EXPECT_TRUE(nabla.gamma.is_zero()) << a;
    EXPECT_TRUE(torsion(nabla).is_zero());
    EXPECT_TRUE(curvature(nabla).is_zero());
  }
}

TEST(RegularConnection, OneDimensional) {
  Chart ch = Chart({"x"}, {});
  Table star({1, 1, 1});
  star[0] = RatFunc(1);
  BaseFManifold base(ch, star, Vec{RatFunc(1)});
  Connection nabla = regular_connection(base, Vec{P(ch, "x+2")});
  EXPECT_TRUE(nabla.gamma.is_zero());
}

TEST(RegularConnection, SemisimpleModelIsFlatWithEuler) {
  Chart ch = Chart({"x1", "x2"}, {});
  Table star({2, 2, 2});
  star.at({0, 0, 0}) = RatFunc(1);
  star.at({1, 1, 1}) = RatFunc(1);
  BaseFManifold base(ch, star, Vec{RatFunc(1), RatFunc(1)});
  Vec E{P(ch, "x1"), P(ch, "x2")};
  Connection nabla = regular_connection(base, E);
  EXPECT_TRUE(nabla.gamma.is_zero());
  EXPECT_TRUE(check_flat_f(base, nabla, E).passed());
}

TEST(RegularConnection, ReparametrizedCanonicalModel) {
  // Canonical model in coordinates (u0, u1) with t0 = u0, t1 = u1^2: ∂u1 = 2 u1 ∂t1, so the
  // flat connection has ∇_{∂u1} ∂u1 = 2 ∂t1 = (1/u1) ∂u1.
  Chart ch = Chart({"u0", "u1"}, {});
  Table star({2, 2, 2});
  star.at({0, 0, 0}) = RatFunc(1);
  star.at({0, 1, 1}) = RatFunc(1);
  star.at({1, 0, 1}) = RatFunc(1);
  BaseFManifold base(ch, star, unit_vector(2, 0));
  ASSERT_TRUE(base.verify().passed());
  Vec E{P(ch, "u0+2"), P(ch, "(u1^2+1)/(2*u1)")};
  Connection nabla = regular_connection(base, E);
  Table expected({2, 2, 2});
  expected.at({1, 1, 1}) = P(ch, "1/u1");
  EXPECT_EQ(nabla.gamma, expected);
  EXPECT_TRUE(check_flat_f(base, nabla, E).passed());
}

TEST(RegularConnection, SingularFrame) {
  Chart ch = Chart({"t0", "t1"}, {});
  Table star({2, 2, 2});
  star.at({0, 0, 0}) = RatFunc(1);
  star.at({0, 1, 1}) = RatFunc(1);
  star.at({1, 0, 1}) = RatFunc(1);
  BaseFManifold base(ch, star, unit_vector(2, 0));
  EXPECT_THROW(regular_connection(base, unit_vector(2, 0)), PreconditionError);
}

TEST(DualityConditions, ConnectionsValuedInKernelOfL) {
  // On the plane example l_X s = X^1 s, so coefficients along ∂x2 never enter the conditions:
  // the dual is an F-manifold even though ∇ is neither flat nor torsion-free.
  auto c = plane_example();
  auto e = field(c.chart, {"1", "0"});
  BaseFManifold base(c.chart, c.star, e.beta);
  int nonflat = 0;
  for (int s = 0; s < 5; ++s) {
    testkit::RandomPoly gen(testkit::seed() + 500 + static_cast<std::uint64_t>(s));
    Connection nabla = Connection::zero(c.chart);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) nabla.gamma.at({i, j, 1}) = RatFunc(gen.poly(c.chart.base_names(), 2, 2));
    if (!check_flat_f(base, nabla).passed()) ++nonflat;
    Report r = check_duality_conditions(c, e, nabla);
    EXPECT_TRUE(r.passed()) << "seed " << s;
    auto d = dualize(c, e, nabla);
    EXPECT_TRUE(check_fmanifold(d.c, d.e).passed()) << "seed " << s;
  }
  EXPECT_GT(nonflat, 0);
}

TEST(DualityConditions, GenericConnectionsBreakAssociativityOnBothSides) {
  auto c = plane_example();
  auto e = field(c.chart, {"1", "0"});
  int failures = 0;
  for (int s = 0; s < 5; ++s) {
    testkit::RandomPoly gen(testkit::seed() + 600 + static_cast<std::uint64_t>(s));
    Connection nabla = random_connection(gen, c.chart, 1);
    Report r = check_duality_conditions(c, e, nabla);
    auto d = dualize(c, e, nabla);
    bool dual_assoc = check_fmanifold(d.c, d.e).find(kAssociativity)->verdict == Verdict::pass;
    EXPECT_EQ(r.find("asoc")->verdict == Verdict::pass, dual_assoc) << "seed " << s;
    if (!dual_assoc) ++failures;
  }
  EXPECT_GT(failures, 0);
}
