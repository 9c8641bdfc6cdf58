// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/tree_function.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace htlab {

TreeFunction::TreeFunction(std::size_t depth, std::vector<std::vector<Vector>> levels) : depth_(depth), levels_(std::move(levels)) {
  if (levels_.empty()) fail(ErrorCode::InvalidArgument, "a tree function needs at least the root level");
  if (levels_.size() - 1 > depth_)
    fail(ErrorCode::InvalidArgument, "tree function stores " + std::to_string(levels_.size()) + " levels but has depth " + std::to_string(depth_));
}

const std::vector<Vector>& TreeFunction::level(std::size_t n) const {
  if (n >= levels_.size()) fail(ErrorCode::InvalidArgument, "level " + std::to_string(n) + " is not stored in this function");
  return levels_[n];
}

const Vector& TreeFunction::value(const WeightedTree& t, const VertexRef& x) const {
  if (x.level > depth_) fail(ErrorCode::InvalidArgument, "vertex " + to_string(x) + " lies below the function's depth");
  if (x.level < levels_.size()) return levels_[x.level].at(x.index);
  return levels_.back().at(t.ancestor(x, explicit_depth()));
}

void TreeFunction::push_level(std::vector<Vector> values) {
  levels_.push_back(std::move(values));
  depth_ = std::max(depth_, explicit_depth());
}

void TreeFunction::truncate(std::size_t n) {
  if (n > depth_) fail(ErrorCode::InvalidArgument, "cannot truncate to a deeper level");
  if (levels_.size() > n + 1) levels_.resize(n + 1);
  depth_ = n;
}

void TreeFunction::set_depth(std::size_t n) {
  if (n < explicit_depth()) fail(ErrorCode::InvalidArgument, "depth below the stored levels");
  depth_ = n;
}

void check_function(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f) {
  if (f.depth() > t.depth())
    fail(ErrorCode::InvalidArgument, "function depth " + std::to_string(f.depth()) + " exceeds tree depth " + std::to_string(t.depth()));
  if (f.explicit_depth() > t.materialized_depth())
    fail(ErrorCode::DepthExhausted, "function stores level " + std::to_string(f.explicit_depth()) + " but the tree stores levels up to " +
                                        std::to_string(t.materialized_depth()));
  for (std::size_t n = 0; n <= f.explicit_depth(); ++n) {
    if (f.level(n).size() != t.level_size(n))
      fail(ErrorCode::InvalidArgument, "function level " + std::to_string(n) + " has " + std::to_string(f.level(n).size()) +
                                           " values, the tree level has " + std::to_string(t.level_size(n)));
    for (const auto& v : f.level(n)) space.check(v);
  }
}

TreeFunction materialize(const WeightedTree& t, const TreeFunction& f, std::size_t n) {
  if (n > f.depth()) fail(ErrorCode::InvalidArgument, "cannot materialize below the function's depth");
  if (n > t.materialized_depth())
    fail(ErrorCode::DepthExhausted, "level " + std::to_string(n) + " is not stored (stored through " + std::to_string(t.materialized_depth()) + ")");
  TreeFunction g = f;
  while (g.explicit_depth() < n) {
    std::size_t m = g.explicit_depth();
    const auto& prev = g.level(m);
    std::vector<Vector> next;
    next.reserve(t.level_size(m + 1));
    for (std::uint64_t i = 0; i < prev.size(); ++i) {
      std::uint32_t c = t.child_count({m, i});
      for (std::uint32_t k = 0; k < c; ++k) next.push_back(prev[i]);
    }
    std::size_t depth = g.depth();
    g.push_level(std::move(next));
    g.set_depth(depth);
  }
  return g;
}

TreeFunction constant_function(const Vector& v, std::size_t depth) { return TreeFunction(depth, {{v}}); }

TreeFunction linear_combination(const WeightedTree& t, const ValueSpace& space, const std::vector<FieldElement>& coeffs,
                                const std::vector<const TreeFunction*>& fs) {
  if (coeffs.size() != fs.size() || fs.empty()) fail(ErrorCode::InvalidArgument, "linear combination needs one coefficient per function");
  std::size_t depth = fs[0]->depth(), stored = 0;
  for (const auto* f : fs) {
    if (f->depth() != depth) fail(ErrorCode::InvalidArgument, "linear combination of functions with different depths");
    stored = std::max(stored, f->explicit_depth());
  }
  std::vector<TreeFunction> expanded;
  expanded.reserve(fs.size());
  for (const auto* f : fs) expanded.push_back(materialize(t, *f, stored));
  std::vector<std::vector<Vector>> levels(stored + 1);
  for (std::size_t n = 0; n <= stored; ++n) {
    std::size_t size = expanded[0].level(n).size();
    levels[n].reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
      Vector acc = space.zero();
      for (std::size_t k = 0; k < fs.size(); ++k) acc = space.add(acc, space.scale(coeffs[k], expanded[k].level(n)[i]));
      levels[n].push_back(std::move(acc));
    }
  }
  return TreeFunction(depth, std::move(levels));
}

}  // namespace htlab
