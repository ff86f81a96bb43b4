#pragma once

// Component calculus on the base: vector fields and sections as coefficient
// vectors in the frames ∂x^i and s_j, with coefficients depending on x.

#include <vector>

#include "fman/tensor.hpp"

namespace fman {

using Vec = std::vector<RatFunc>;

Vec zeros(int n);
Vec unit_vector(int n, int i);
bool is_zero(const Vec& v);

Vec& operator+=(Vec& a, const Vec& b);
Vec& operator-=(Vec& a, const Vec& b);
Vec operator+(Vec a, const Vec& b);
Vec operator-(Vec a, const Vec& b);
Vec operator-(Vec a);
Vec operator*(const RatFunc& f, Vec v);

/// X(f) for a base vector field X (n components over the base coordinates of chart).
RatFunc derivative(const Chart& chart, const Vec& X, const RatFunc& f);
/// X applied componentwise.
Vec derivative(const Chart& chart, const Vec& X, const Vec& v);
Vec bracket(const Chart& chart, const Vec& X, const Vec& Y);

/// t(X, Y) for t.at({i, j, a}).
Vec apply21(const Table& t, const Vec& X, const Vec& Y);
/// L_X(t) for a (2,1)-tensor on the base in the layout t.at({i, j, a}).
Table lie_derivative21(const Chart& chart, const Table& t, const Vec& X);
/// L_U(t)(A, B) = [U, t(A,B)] - t([U,A], B) - t(A, [U,B]) for arbitrary fields.
Vec lie_apply21(const Chart& chart, const Table& t, const Vec& U, const Vec& A, const Vec& B);

}  // namespace fman
