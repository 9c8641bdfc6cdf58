// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Functions f : T_0 u ... u T_N -> E.
//
// Values are stored level by level for levels 0..explicit_depth(). When the
// defined depth N is larger, the deeper levels form a held tail: every
// vertex below the last explicit level carries the value of its ancestor on
// that level. Constant extension produces such tails, which is how
// functions reach depths whose levels are never stored.

#pragma once

#include <vector>

#include "core/tree.hpp"
#include "core/value_space.hpp"

namespace htlab {

class TreeFunction {
 public:
  TreeFunction() = default;
  // levels must be nonempty; levels.size() - 1 <= depth.
  TreeFunction(std::size_t depth, std::vector<std::vector<Vector>> levels);

  std::size_t depth() const { return depth_; }
  std::size_t explicit_depth() const { return levels_.size() - 1; }
  bool has_tail() const { return depth_ > explicit_depth(); }

  const std::vector<Vector>& level(std::size_t n) const;  // explicit levels only
  const std::vector<std::vector<Vector>>& levels() const { return levels_; }

  // Value at any vertex of levels 0..depth().
  const Vector& value(const WeightedTree& t, const VertexRef& x) const;

  // Appends an explicit level; the defined depth grows if needed.
  void push_level(std::vector<Vector> values);
  // Drops explicit levels beyond n and sets the defined depth to n.
  void truncate(std::size_t n);
  // Keeps the explicit levels and sets the defined depth (>= explicit depth).
  void set_depth(std::size_t n);

 private:
  std::size_t depth_ = 0;
  std::vector<std::vector<Vector>> levels_;
};

// Throws unless every explicit level matches the tree and the space.
void check_function(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f);

// Same function with levels 0..n stored (n <= f.depth()).
TreeFunction materialize(const WeightedTree& t, const TreeFunction& f, std::size_t n);

// The function equal to v everywhere on levels 0..depth (a held tail).
TreeFunction constant_function(const Vector& v, std::size_t depth);

// Vertexwise sum of a_k f_k. Tails are materialized up to the deepest
// explicit level among the inputs.
TreeFunction linear_combination(const WeightedTree& t, const ValueSpace& space, const std::vector<FieldElement>& coeffs,
                                const std::vector<const TreeFunction*>& fs);

}  // namespace htlab
