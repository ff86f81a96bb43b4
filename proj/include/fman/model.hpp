#pragma once

// Line-oriented model files.
//
//   [meta]        name = ..., description = ...
//   [chart]       base = x1 x2, fiber = xi
//   [star]        a i j = expr     coefficient of ∂a in ∂i * ∂j
//   [l]           i j k = expr     coefficient of s_k in l_{∂i} s_j
//   [D]           i j k p = expr   coefficient of s_p in D_{∂i,∂j} s_k
//   [unit]        coord = expr     component of the unit field along ∂coord
//   [euler.NAME]  coord = expr     Euler candidate
//   [connection]  k i j = expr     Γ^k_ij
//   [gamma]       i j = expr       γ(∂i, ∂j), i < j
//   [H]           i j k = expr     H(∂i, ∂j, ∂k), i < j < k
//
// Indices are 1-based, missing entries are 0 and '#' starts a comment.

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fman/gengeo.hpp"

namespace fman {

struct ModelFile {
  std::string name;
  std::string description;
  Chart chart;
  MultComponents components;
  std::optional<LinearVectorField> unit;
  std::vector<std::pair<std::string, LinearVectorField>> euler;
  std::optional<Connection> connection;
  std::optional<TwoForm> gamma;
  std::optional<ThreeForm> H;

  BaseFManifold base() const;  // requires k = 0 and a unit
  const LinearVectorField& require_unit() const;
  const LinearVectorField& candidate(const std::string& name) const;

  friend bool operator==(const ModelFile&, const ModelFile&) = default;
};

/// Throws InputError with "source:line:"; ParseError when an expression is malformed.
ModelFile parse_model(std::istream& in, const std::string& source = "<input>");
ModelFile load_model(const std::string& path);
std::string save_model(const ModelFile& m);

/// A model holding a linear multiplication and its unit, with chart taken from the components.
ModelFile make_model(std::string name, const MultComponents& c, const LinearVectorField& e);

}  // namespace fman
