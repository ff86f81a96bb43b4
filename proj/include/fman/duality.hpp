#pragma once

// Connections on the base, flat F-manifolds, and the duality between linear
// multiplications on E and on E* induced by a connection.

#include <optional>
#include <string>
#include <vector>

#include "fman/fman.hpp"

namespace fman {

/// Linear connection on the base: ∇_{∂i} ∂j = Γ^k_ij ∂k with gamma.at({i, j, k}) = Γ^k_ij.
struct Connection {
  Chart chart;  // base chart, k = 0
  Table gamma;

  Connection() = default;
  Connection(Chart chart, Table gamma);
  static Connection zero(const Chart& chart);

  int n() const { return chart.n(); }
  Vec covariant(const Vec& X, const Vec& Y) const;  // ∇_X Y

  friend bool operator==(const Connection&, const Connection&) = default;
};

/// torsion.at({i, j, k}) = T^k_ij, the ∂k-coefficient of T(∂i, ∂j).
Table torsion(const Connection& nabla);
/// curvature.at({i, j, l, k}) = ∂k-coefficient of R(∂i, ∂j)∂l.
Table curvature(const Connection& nabla);
Vec torsion(const Connection& nabla, const Vec& X, const Vec& Y);
Vec curvature(const Connection& nabla, const Vec& X, const Vec& Y, const Vec& Z);
/// <X : Y> = ∇_X Y + ∇_Y X.
Vec symmetric_bracket(const Connection& nabla, const Vec& X, const Vec& Y);
/// (∇_X *)(Y, Z) = ∇_X(Y*Z) - (∇_X Y)*Z - Y*(∇_X Z).
Vec nabla_star(const Connection& nabla, const Table& star, const Vec& X, const Vec& Y, const Vec& Z);
/// (∇²E)_{X,Y} = ∇_X ∇_Y E - ∇_{∇_X Y} E.
Vec nabla2(const Connection& nabla, const Vec& E, const Vec& X, const Vec& Y);

struct FlatFStructure {
  BaseFManifold base;
  Connection nabla;
  std::optional<Vec> euler;
};

/// Torsion, curvature, ∇ē = 0, symmetry of ∇(*) and, with an Euler field, L_Ē(*) = * and ∇²Ē = 0,
/// each as its own record. Throws PreconditionError when the base does not verify.
Report check_flat_f(const BaseFManifold& base, const Connection& nabla, const std::optional<Vec>& euler = std::nullopt);
Report check_flat_f(const FlatFStructure& s);

/// Chart of E*: fiber coordinates xi* become mu* and conversely; other names get or lose a "dual_" prefix.
Chart dual_chart(const Chart& chart);

struct DualData {
  MultComponents c;
  LinearVectorField e;
};

/// (D*, l*, *) on the dual frame μ^j and e* with Λ* = -Λᵀ.
DualData dualize(const MultComponents& c, const LinearVectorField& e, const Connection& nabla);
/// The dual linear vector field X* on E*.
LinearVectorField dualize(const LinearVectorField& X);

/// Associativity, unit and integrability conditions for the dual multiplication, and the Euler
/// condition when E is given; cross-checked against the battery on the dual data.
/// Throws PreconditionError when (c, e) does not pass the battery.
Report check_duality_conditions(const MultComponents& c, const LinearVectorField& e, const Connection& nabla,
                                const LinearVectorField* E = nullptr);

/// ē, Ē, Ē*Ē, ... (n fields).
std::vector<Vec> star_powers(const BaseFManifold& base, const Vec& E);
/// ∇_X Ē^i = i Ē^{i-1} * X solved in the power frame. Throws PreconditionError when the frame is singular.
Connection regular_connection(const BaseFManifold& base, const Vec& E);
inline constexpr const char* kRegularCategoryNote =
    "regular connection: construction stated for holomorphic F-manifolds, applied here to real rational data";

}  // namespace fman
