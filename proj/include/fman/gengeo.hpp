#pragma once

// Generalized tangent bundle 𝕋M = TM ⊕ T*M: anchor, pairing, Dorfman bracket,
// compatibility of linear F-manifolds on 𝕋M with these structures, B-field
// transformations and the exact Courant classification.
//
// Fiber layout on 𝕋M: s_j = ∂x^j for j < n, s_{n+j} = dx^j.

#include <optional>
#include <string>

#include "fman/prolong.hpp"

namespace fman {

/// X + ξ with coefficients on the base.
struct GenSection {
  Vec X;
  Vec xi;

  static GenSection from_fiber(const Vec& s);  // length 2n
  Vec to_fiber() const;
  friend bool operator==(const GenSection&, const GenSection&) = default;
};

/// γ = Σ_{i<j} γ_ij dx^i ∧ dx^j with g.at({i, j}) = γ(∂i, ∂j).
struct TwoForm {
  Chart chart;  // base chart
  Table g;

  TwoForm() = default;
  /// Throws InputError unless g is n×n, antisymmetric and base-only.
  TwoForm(Chart chart, Table g);
  static TwoForm zero(const Chart& chart);
  int n() const { return chart.n(); }
  RatFunc operator()(const Vec& X, const Vec& Y) const;
  Vec contract(const Vec& X) const;  // i_X γ
  TwoForm operator-() const;
  friend bool operator==(const TwoForm&, const TwoForm&) = default;
};

/// h.at({i, j, k}) = H(∂i, ∂j, ∂k), totally antisymmetric.
struct ThreeForm {
  Chart chart;
  Table h;

  ThreeForm() = default;
  /// Throws InputError unless h is totally antisymmetric and base-only.
  ThreeForm(Chart chart, Table h);
  static ThreeForm zero(const Chart& chart);
  int n() const { return chart.n(); }
  RatFunc operator()(const Vec& X, const Vec& Y, const Vec& Z) const;
  bool is_zero() const { return h.is_zero(); }
  bool is_closed() const;
  ThreeForm operator+(const ThreeForm& o) const;
  ThreeForm operator-(const ThreeForm& o) const;
  ThreeForm scaled(const RatFunc& f) const;
  friend bool operator==(const ThreeForm&, const ThreeForm&) = default;
};

ThreeForm exterior_derivative(const TwoForm& g);
/// (∇_{∂k} γ)(∂i, ∂j) as a table at({k, i, j}).
Table covariant_derivative(const Connection& nabla, const TwoForm& g);

RatFunc pairing(const GenSection& a, const GenSection& b);  // ½(ξ(Y) + η(X))
Vec anchor(const GenSection& s);
/// [X+ξ, Y+η]_H = L_X(Y+η) - i_Y dξ + i_X i_Y H, where (i_X i_Y H)(Z) = H(Y, X, Z).
/// Throws InputError when H is not closed.
GenSection dorfman(const Chart& chart, const GenSection& a, const GenSection& b,
                   const std::optional<ThreeForm>& H = std::nullopt);

/// π(l_X s) = X * π(s) and π(D_{X,Y} s) = L_{π(s)}(*)(X, Y) on frames.
/// Throws InputError unless the fiber rank is 2n.
Report check_anchor_compat(const MultComponents& c);

/// Image under the pairing isomorphism against the ∇-dual, and the frame identities
/// <l_X s, s~> = <l_X s~, s>, the D-identity and skewness of Δ_e; both routes are cross-checked.
/// Throws PreconditionError unless (c.star, e.beta, ∇) is a flat F-manifold.
Report check_scalar_compat(const MultComponents& c, const LinearVectorField& e, const Connection& nabla);

/// The two Dorfman compatibility identities on coordinate frames, with the bracket twisted by H.
/// Throws PreconditionError when Γ ≠ 0 and InputError when H is not closed.
Report check_dorfman_compat(const MultComponents& c, const Connection& nabla,
                            const std::optional<ThreeForm>& H = std::nullopt);

/// Block matrix of I_γ: X + ξ ↦ X + ξ + i_X γ.
Matrix bfield_matrix(const TwoForm& g);
/// Conjugation of (c, e) by I_γ. Throws InputError unless the fiber rank is 2n.
DualData bfield_transform(const MultComponents& c, const LinearVectorField& e, const TwoForm& g);

/// B.at({x, y, z, v}) = (B_{∂x,∂y} ∂z)(∂v), A.at({x, y, z}) = (A_{∂x} ∂y)(∂z), S.at({x, z}) = (S ∂x)(∂z).
struct BFieldData {
  Table B;
  Table A;
  Table S;
  friend bool operator==(const BFieldData&, const BFieldData&) = default;
};

/// B, A and S computed from γ by their closed-form expressions.
BFieldData closed_form_bfield(const BaseFManifold& base, const Connection& nabla, const TwoForm& g);

struct BFieldRecovery {
  BFieldData data;     // differences to the generalized prolongation on the TM-block
  TwoForm gamma;       // γ(X, Y) = ½ (A_X Y - A_Y X)(ē)
  IdentityRecord record;  // consistency of the whole difference with γ
};
/// Throws InputError unless the fiber rank is 2n; the base must be flat under ∇.
BFieldRecovery recover_bfield(const MultComponents& c, const LinearVectorField& e, const Connection& nabla);

struct CourantClassification {
  Report report;
  bool exact = false;
  std::optional<TwoForm> gamma;
  std::optional<BFieldData> recovered;
  std::optional<BFieldData> closed_form;
};

/// Predicate ∇γ = (1/3) dγ and H = (1/3) dγ, as a record.
IdentityRecord courant_predicate(const Connection& nabla, const TwoForm& g, const ThreeForm& H);

/// Anchor and scalar compatibility, γ recovery, Dorfman compatibility and the predicate above.
/// Throws PreconditionError unless (c, e) passes the battery and the base is flat under ∇.
CourantClassification classify_exact_courant(const MultComponents& c, const LinearVectorField& e,
                                             const Connection& nabla,
                                             const std::optional<ThreeForm>& H = std::nullopt);

}  // namespace fman
