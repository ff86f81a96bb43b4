#pragma once

// Tangent, cotangent and generalized prolongations of an F-manifold, direct
// sums, conjugation by fiber isomorphisms, and the five-field identity used
// for the tangent prolongation.

#include <optional>
#include <string>

#include "fman/duality.hpp"

namespace fman {

enum class ProlongationKind { tangent, cotangent, generalized };
std::string to_string(ProlongationKind k);

struct ProlongedStructure {
  ProlongationKind kind;
  MultComponents components;
  LinearVectorField unit;
  BaseFManifold base;
  std::optional<Connection> nabla;
};

/// Tangent lift X^T: beta = X, Λ_{mj} = ∂_j X^m, so that Δ = L_X on vector fields.
/// `chart` is the chart of TM (fiber rank n).
LinearVectorField tangent_lift(const Chart& chart, const Vec& X);
/// Chart of TM with fiber coordinates xi1..xin.
Chart tangent_chart(const Chart& base);

/// D_{Y,Z} ∂j = L_{∂j}(*)(Y,Z), l_Y ∂j = ∂j * Y, star unchanged, unit ē^T.
/// Throws PreconditionError when the base does not verify.
ProlongedStructure tangent_prolongation(const BaseFManifold& base);
/// Dual of the tangent prolongation under ∇. Throws PreconditionError unless (base, ∇) is flat.
ProlongedStructure cotangent_prolongation(const BaseFManifold& base, const Connection& nabla);
/// Direct sum of tangent and cotangent prolongations; fibers ordered xi1..xin, mu1..mun.
ProlongedStructure generalized_prolongation(const BaseFManifold& base, const Connection& nabla);

/// Block-diagonal components over the concatenated fiber. Throws InputError on differing base or star.
MultComponents direct_sum(const MultComponents& a, const MultComponents& b);
LinearVectorField direct_sum(const LinearVectorField& a, const LinearVectorField& b);

/// Transport along I: E -> E with I s_j = Σ_i I[i][j] s_i (base-dependent, invertible).
/// Throws InputError when I is singular or has the wrong size.
MultComponents conjugate(const MultComponents& c, const Matrix& I);
LinearVectorField conjugate(const LinearVectorField& X, const Matrix& I);

/// The five-field identity on an F-manifold, evaluated without checking the base.
IdentityCheck five_field_identity(const Chart& chart, const Table& star);
/// Throws PreconditionError when the base does not verify.
Report check_five_field_identity(const BaseFManifold& base);

}  // namespace fman
