#pragma once

// Charted tensor fields on the total space of a vector bundle E -> M with
// coordinates (x^1..x^n, xi^1..xi^k), and the dictionary between fiberwise
// linear (p,1)-tensors and their component tables.

#include <initializer_list>
#include <string>
#include <vector>

#include "fman/symcore.hpp"

namespace fman {

/// Single global chart: base coordinates followed by fiber coordinates.
class Chart {
 public:
  Chart() = default;
  Chart(std::vector<std::string> base, std::vector<std::string> fiber);
  /// x1..xn and <prefix>1..<prefix>k.
  static Chart standard(int n, int k, const std::string& fiber_prefix = "xi");

  int n() const { return static_cast<int>(base_.size()); }
  int k() const { return static_cast<int>(fiber_.size()); }
  int dim() const { return n() + k(); }

  /// Coordinate i of the total space; base coordinates come first.
  VarId var(int i) const { return ids_.at(static_cast<std::size_t>(i)); }
  VarId base_var(int i) const { return ids_.at(static_cast<std::size_t>(i)); }
  VarId fiber_var(int j) const { return ids_.at(static_cast<std::size_t>(n() + j)); }
  bool is_fiber_index(int i) const { return i >= n(); }

  const std::vector<std::string>& base_names() const { return base_; }
  const std::vector<std::string>& fiber_names() const { return fiber_; }
  std::vector<std::string> all_names() const;

  Chart base_chart() const { return Chart(base_, {}); }
  Chart with_fiber(std::vector<std::string> fiber) const { return Chart(base_, std::move(fiber)); }

  /// True if f involves no fiber coordinate of this chart.
  bool is_base_only(const RatFunc& f) const;

  friend bool operator==(const Chart& a, const Chart& b) {
    return a.base_ == b.base_ && a.fiber_ == b.fiber_;
  }

 private:
  std::vector<std::string> base_;
  std::vector<std::string> fiber_;
  std::vector<VarId> ids_;
};

/// Dense multi-dimensional array of rational functions.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<int> dims);

  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return data_.size(); }
  std::size_t flat(std::initializer_list<int> idx) const;
  std::size_t flat(const std::vector<int>& idx) const;
  std::vector<int> unflatten(std::size_t flat) const;

  RatFunc& at(std::initializer_list<int> idx) { return data_[flat(idx)]; }
  const RatFunc& at(std::initializer_list<int> idx) const { return data_[flat(idx)]; }
  RatFunc& at(const std::vector<int>& idx) { return data_[flat(idx)]; }
  const RatFunc& at(const std::vector<int>& idx) const { return data_[flat(idx)]; }
  RatFunc& operator[](std::size_t i) { return data_[i]; }
  const RatFunc& operator[](std::size_t i) const { return data_[i]; }

  bool is_zero() const;
  Table operator-(const Table& o) const;
  Table operator+(const Table& o) const;

  friend bool operator==(const Table& a, const Table& b) = default;

 private:
  std::vector<int> dims_;
  std::vector<RatFunc> data_;
};

/// Tensor field with p covariant slots and q in {0, 1} contravariant slots.
/// Component (i_1..i_p ; a) is the coefficient of dz^{i_1}⊗..⊗dz^{i_p}⊗∂z^a.
class TensorField {
 public:
  TensorField() = default;
  TensorField(Chart chart, int p, int q);

  static TensorField vector_field(const Chart& chart, const std::vector<RatFunc>& components);
  static TensorField coordinate_field(const Chart& chart, int i);
  static TensorField differential(const Chart& chart, int i);

  const Chart& chart() const { return chart_; }
  int p() const { return p_; }
  int q() const { return q_; }
  std::size_t size() const { return coeffs_.size(); }

  /// `lower` has p entries; `upper` is ignored when q = 0.
  RatFunc& at(const std::vector<int>& lower, int upper = 0);
  const RatFunc& at(const std::vector<int>& lower, int upper = 0) const;
  RatFunc& operator[](std::size_t i) { return coeffs_[i]; }
  const RatFunc& operator[](std::size_t i) const { return coeffs_[i]; }
  /// Decodes a flat position into (lower, upper).
  std::pair<std::vector<int>, int> index(std::size_t flat) const;

  /// Components of a vector field (p = 0, q = 1).
  std::vector<RatFunc> components() const;

  bool is_zero() const;
  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(const RatFunc& f, TensorField t);

  friend bool operator==(const TensorField& a, const TensorField& b) {
    return a.chart_ == b.chart_ && a.p_ == b.p_ && a.q_ == b.q_ && a.coeffs_ == b.coeffs_;
  }

  std::string to_string() const;

 private:
  std::size_t flat(const std::vector<int>& lower, int upper) const;

  Chart chart_;
  int p_ = 0;
  int q_ = 0;
  std::vector<RatFunc> coeffs_;
};

/// Sum of f_j s_j over the frame sections; components depend on x only.
struct Section {
  Chart chart;
  std::vector<RatFunc> components;

  Section(Chart c, std::vector<RatFunc> comps);
  static Section frame(const Chart& chart, int j);
};

TensorField lie_derivative(const TensorField& X, const TensorField& T);
TensorField lie_bracket(const TensorField& X, const TensorField& Y);
/// Inserts the vector field S into covariant slot `slot` of T.
TensorField contract(const TensorField& T, int slot, const TensorField& S);
/// Tensor product; the result must still have q <= 1.
TensorField tensor_product(const TensorField& a, const TensorField& b);

enum class ScalingClass { linear, core, neither };
/// Behaviour under the fiber scaling xi -> t xi. The zero tensor is reported as linear.
ScalingClass scaling_class(const TensorField& T);
bool is_linear(const TensorField& T);
bool is_core(const TensorField& T);

TensorField vertical_lift(const Section& s);

/// Components of a linear (p,1)-tensor.
///   D.at({x_1..x_p, j, i})         coefficient of s_i in D_{∂x_1..∂x_p} s_j
///   l[r].at({x's without slot r, j, i})  coefficient of s_i in l^{(r)} s_j
///   basic.at({x_1..x_p, a})        coefficient of ∂x^a in T(∂x_1..∂x_p)
struct LinearComponents {
  Chart chart;
  int p = 0;
  Table D;
  std::vector<Table> l;
  Table basic;

  static LinearComponents zero(const Chart& chart, int p);
  friend bool operator==(const LinearComponents&, const LinearComponents&) = default;
};

/// Raised by assemble when the tables do not generate a tensor whose Lie
/// derivatives along (x_a s_j)^ obey the Leibniz expansion.
class LeibnizViolation : public InputError {
 public:
  LeibnizViolation(int coordinate, int section, std::vector<int> slot, const std::string& detail);
  int coordinate() const { return coordinate_; }
  int section() const { return section_; }
  /// Lower indices followed by the upper index of the offending component.
  const std::vector<int>& slot() const { return slot_; }

 private:
  int coordinate_;
  int section_;
  std::vector<int> slot_;
};

LinearComponents extract_components(const TensorField& T);
TensorField assemble(const LinearComponents& c);

}  // namespace fman
