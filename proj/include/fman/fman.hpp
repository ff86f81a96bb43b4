#pragma once

// Linear multiplications on a vector bundle, described by their components
// (D, l, *), and the F-manifold axiom battery on those components.

#include <optional>
#include <string>
#include <vector>

#include "fman/calculus.hpp"
#include "fman/report.hpp"
#include "fman/tensor.hpp"

namespace fman {

/// Components of a commutative linear (2,1)-tensor ∘ on E.
///   D.at({x, y, j, i})  coefficient of s_i in D_{∂x,∂y} s_j
///   l.at({x, j, i})     coefficient of s_i in l_{∂x} s_j
///   star.at({i, j, a})  coefficient of ∂x^a in ∂x^i * ∂x^j
struct MultComponents {
  Chart chart;
  Table D;
  Table l;
  Table star;

  static MultComponents zero(const Chart& chart);
  /// Throws InputError on wrong dimensions or fiber-dependent entries.
  void validate() const;

  int n() const { return chart.n(); }
  int k() const { return chart.k(); }

  Vec product(const Vec& X, const Vec& Y) const;  // X * Y
  Vec l_apply(const Vec& X, const Vec& s) const;   // l_X s
  /// D_{X,Y} s for an arbitrary section s, using the Leibniz rule with l^{(1)} = l^{(2)} = l.
  Vec D_apply(const Vec& X, const Vec& Y, const Vec& s) const;

  friend bool operator==(const MultComponents&, const MultComponents&) = default;
};

/// Linear components with l^{(1)} = l and l^{(2)} = l2 (defaults to l).
LinearComponents to_linear(const MultComponents& c, const std::optional<Table>& l2 = std::nullopt);
/// Inverse of to_linear; the second l-table is returned through l2 when requested.
MultComponents from_linear(const LinearComponents& c, Table* l2 = nullptr);
TensorField assemble(const MultComponents& c, const std::optional<Table>& l2 = std::nullopt);

/// Fiberwise linear vector field β^i ∂x^i + Σ_j (Σ_i Λ_{ji} ξ^i) ∂ξ^j,
/// lambda.at({j, i}) = Λ_{ji}.
struct LinearVectorField {
  Chart chart;
  Vec beta;
  Table lambda;

  static LinearVectorField zero(const Chart& chart);
  static LinearVectorField base_field(const Chart& chart, const Vec& beta);
  /// Throws InputError when X is not fiberwise linear.
  static LinearVectorField from_tensor(const TensorField& X);
  TensorField to_tensor() const;
  void validate() const;

  /// The derivation Δ with (Δ s)^ = [field, s^]; on frames Δ s_j = -Σ_m Λ_{mj} s_m.
  Vec derivation(const Vec& s) const;

  friend bool operator==(const LinearVectorField&, const LinearVectorField&) = default;
};

/// (M, *, ē) with k = 0 chart.
struct BaseFManifold {
  Chart chart;
  Table star;
  Vec unit;

  BaseFManifold(Chart chart, Table star, Vec unit);
  int n() const { return chart.n(); }
  Vec product(const Vec& X, const Vec& Y) const { return apply21(star, X, Y); }
  /// Commutativity, associativity, unit and the integrability condition.
  Report verify() const;

  friend bool operator==(const BaseFManifold&, const BaseFManifold&) = default;
};

// Record names used in every battery report.
inline constexpr const char* kCommutativity = "commutativity";
inline constexpr const char* kAssociativity = "associativity";
inline constexpr const char* kUnit = "unit";
inline constexpr const char* kBaseIntegrability = "base-integrability";
inline constexpr const char* kIntegrabilityL = "integrability-l";
inline constexpr const char* kIntegrabilityD = "integrability-D";

Report check_commutative(const MultComponents& c, const std::optional<Table>& l2 = std::nullopt);
Report check_associative(const MultComponents& c);
Report check_unit(const MultComponents& c, const LinearVectorField& e);
struct HertlingManinOptions {
  bool tensor_oracle = true;
};
Report check_hertling_manin(const MultComponents& c, HertlingManinOptions options = {});
/// All six records in dependency order; records after the first failure are skipped.
Report check_fmanifold(const MultComponents& c, const LinearVectorField& e, HertlingManinOptions options = {});

BaseFManifold check_base(const MultComponents& c, const LinearVectorField& e);

/// Components (D̃, l̃, r̃) of L_X(∘).
MultComponents lie_components(const MultComponents& c, const LinearVectorField& X);

Report check_euler(const MultComponents& c, const LinearVectorField& e, const LinearVectorField& E);

/// Every identity used by the battery and the Euler check, by sub-identity name,
/// so that a reported witness can be re-evaluated on its own.
std::vector<IdentityCheck> battery_identities(const MultComponents& c, const LinearVectorField* e,
                                              const LinearVectorField* E = nullptr);

/// Direct checks on an assembled tensor ∘ over the coordinate frame of E.
namespace oracle {

TensorField product(const TensorField& circ, const TensorField& X, const TensorField& Y);
/// First (a, b) with E_a ∘ E_b != E_b ∘ E_a.
std::optional<std::vector<int>> commutativity_witness(const TensorField& circ);
/// First (a, b, c) with (E_a∘E_b)∘E_c != E_a∘(E_b∘E_c).
std::optional<std::vector<int>> associativity_witness(const TensorField& circ);
/// First a with e ∘ E_a != E_a.
std::optional<std::vector<int>> unit_witness(const TensorField& circ, const TensorField& e);
/// P(X,Y,Z,V) = L_{X∘Y}(∘)(Z,V) - X∘L_Y(∘)(Z,V) - Y∘L_X(∘)(Z,V) as a (4,1)-tensor.
TensorField hertling_manin_tensor(const TensorField& circ);
bool is_euler(const TensorField& circ, const TensorField& E);

}  // namespace oracle

}  // namespace fman
