// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Truncated rooted trees T_0 .. T_D with edge weights w in F \ {0} and exact
// transition probabilities q.
//
// Vertices are stored breadth-first: level by level, and within a level by
// parent order then child order. This is also the fixed enumeration used by
// the product metric rho. Children of a vertex are contiguous in the next
// level, so every (level, index) pair maps to one flat id.
//
// Rule-generated trees (constant or per-level branching, q and w given per
// child index) may be deeper than the vertex cap allows to store. Levels up
// to materialized_depth() are stored; deeper levels are "virtual": they are
// described only by their level rule and can host constant (held) function
// tails but nothing that needs per-vertex storage.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "core/field.hpp"

namespace htlab {

struct VertexRef {
  std::size_t level = 0;
  std::uint64_t index = 0;

  friend bool operator==(const VertexRef&, const VertexRef&) = default;
};

std::string to_string(const VertexRef& v);

struct TreeConfig {
  struct Uniform {};
  struct Ones {};
  struct FromQ {};
  // Per-vertex child counts of every internal vertex, breadth-first.
  struct ExplicitChildren {
    std::vector<std::uint32_t> counts;
  };
  // Same list for every vertex, indexed by child position.
  template <class T>
  struct PerChild {
    std::vector<T> values;
  };
  // One entry per edge, in breadth-first order of the child vertex.
  template <class T>
  struct PerEdge {
    std::vector<T> values;
  };

  using Branching = std::variant<std::uint32_t, std::vector<std::uint32_t>, ExplicitChildren>;
  using QSpec = std::variant<Uniform, PerChild<Rational>, PerEdge<Rational>>;
  using WSpec = std::variant<Ones, FromQ, PerChild<FieldElement>, PerEdge<FieldElement>>;

  std::size_t depth = 0;
  FieldSpec field = FieldSpec::rational();
  Branching branching = std::uint32_t{2};
  QSpec q = Uniform{};
  WSpec w = Ones{};
  // Optional ceiling on stored levels for rule-generated trees.
  std::optional<std::size_t> materialize;
  // Overrides HTLAB_MAX_VERTICES when set.
  std::optional<std::uint64_t> max_vertices;

  bool rule_generated() const;

  static TreeConfig uniform(std::size_t depth, std::uint32_t branching, FieldSpec field);
};

// Vertex cap from HTLAB_MAX_VERTICES, default 2^21.
std::uint64_t default_max_vertices();

class WeightedTree {
 public:
  std::size_t depth() const { return depth_; }
  std::size_t materialized_depth() const { return level_offset_.size() - 2; }
  const FieldSpec& field() const { return field_; }

  std::uint64_t level_size(std::size_t n) const;  // stored levels only
  std::uint64_t vertex_count() const { return level_offset_.back(); }
  bool contains(const VertexRef& v) const;

  std::uint32_t child_count(const VertexRef& x) const;
  std::uint64_t first_child(const VertexRef& x) const;  // index in level+1
  VertexRef child(const VertexRef& x, std::uint32_t i) const;
  VertexRef parent(const VertexRef& y) const;
  // Index of y's ancestor at the given level (level <= y.level).
  std::uint64_t ancestor(const VertexRef& y, std::size_t level) const;
  // Level-`level` descendants of x as an index range [first, last).
  std::pair<std::uint64_t, std::uint64_t> descendants(const VertexRef& x, std::size_t level) const;

  // Edge data for the edge (parent(y), y).
  const Rational& q(const VertexRef& y) const;
  const FieldElement& w(const VertexRef& y) const;
  FieldElement weight_sum(const VertexRef& x) const;  // sum over S(x) of w(x, .)

  // P(B_x): product of q along the root path.
  const Rational& sector_prob(const VertexRef& x) const;

  // Rule of a level whose vertices share branching, q and w (every level
  // of a rule-generated tree). Virtual levels always have one.
  struct LevelRule {
    std::uint32_t branching = 0;
    std::vector<Rational> q;
    std::vector<FieldElement> w;
  };
  const LevelRule* rule(std::size_t level) const;

 private:
  friend class TreeAssembler;

  std::size_t id(const VertexRef& v) const;
  void require(const VertexRef& v) const;

  std::size_t depth_ = 0;
  FieldSpec field_;
  std::vector<std::uint64_t> level_offset_{0, 1};  // size M + 2
  std::vector<std::uint32_t> parent_;               // flat id of parent
  std::vector<std::uint32_t> first_child_;          // flat id of first child
  std::vector<std::uint32_t> child_count_;
  std::vector<std::uint32_t> q_idx_;       // into rationals_
  std::vector<std::uint32_t> w_idx_;       // into weights_
  std::vector<std::uint32_t> sector_idx_;  // into rationals_
  std::vector<Rational> rationals_;
  std::vector<FieldElement> weights_;
  std::vector<LevelRule> rules_;  // empty, or one per level 0..D-1
};

struct TreeBuildOutcome {
  std::optional<WeightedTree> tree;
  std::vector<std::string> issues;  // invariant violations, each naming a vertex or edge
};

// Validates every invariant and collects all violations instead of stopping
// at the first one. Throws only for resource limits.
TreeBuildOutcome try_build_tree(const TreeConfig& config);

// Throws Error(Validation) listing the violations.
WeightedTree build_tree(const TreeConfig& config);

// Descendant of x at `target_level` reached by always stepping to a child of
// minimal q (lowest child index on ties). P(B_result) <= P(B_x) 2^{-(K-n)}.
VertexRef min_prob_descendant(const WeightedTree& t, const VertexRef& x, std::size_t target_level);

// Tree on the levels listed in tau (must start at 0, strictly increasing,
// within the stored levels). Edges join a vertex to its descendants on the
// next listed level; q and w are the path products.
WeightedTree collapse(const WeightedTree& t, const std::vector<std::size_t>& tau);

}  // namespace htlab
