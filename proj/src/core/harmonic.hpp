// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Harmonicity f(x) = sum_{y in S(x)} w(x,y) f(y), the product metric rho,
// and the extension solvers that grow a harmonic function by one or more
// levels while hitting prescribed values everywhere except one free slot
// per base vertex.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/boundary.hpp"

namespace htlab {

struct HarmonicCheck {
  bool ok = true;
  std::size_t violation_count = 0;
  std::vector<std::string> violations;  // first few offending vertices
};

// Checks every vertex on levels 0..f.depth()-1.
HarmonicCheck is_harmonic(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f);

// sum_i 2^{-i} d/(1+d) over the breadth-first enumeration of levels
// 0..depth. Both functions must have the same depth.
Real rho(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, const TreeFunction& g);

// One designated level-`target` descendant beta per level-`base` vertex.
struct FreeSlots {
  std::size_t base = 0;
  std::size_t target = 0;
  std::vector<std::uint64_t> beta;  // beta[i] is the slot of (base, i)
};

// Slots reached by min_prob_descendant.
FreeSlots greedy_slots(const WeightedTree& t, std::size_t base, std::size_t target);

// P of the union of the slot sectors.
Rational slot_mass(const WeightedTree& t, const FreeSlots& slots);

// Prescribed values on T_K; slots must stay empty for the solver.
using SlotTargets = std::vector<std::optional<Vector>>;

// refine(h, K) with the slots left empty.
SlotTargets targets_off_slots(const WeightedTree& t, const FreeSlots& slots, const StepFunction& h);

// Extends f (depth N = slots.base, harmonic) to depth K = slots.target so
// that F = g off the slots and F is harmonic on levels 0..K-1. Vertices off
// the slot paths are filled bottom-up from g, then each path is solved top
// down for the single unknown child.
TreeFunction extend_lemma35(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, const FreeSlots& slots,
                            const SlotTargets& g);

// Same extension by induction on K - N: the one-level case solves for the
// slot directly; otherwise targets are pushed up one level, the shorter
// problem is solved, and the slot value is recovered from its parent.
TreeFunction extend_lemma35_inductive(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, const FreeSlots& slots,
                                      const SlotTargets& g);

// First vertex on levels [from, to) whose weights do not sum to 1.
std::optional<std::string> assumption2_violation(const WeightedTree& t, std::size_t from, std::size_t to);

// Every new vertex inherits its parent's value (held tail to depth n).
// Requires sum_y w(x,y) = 1 on levels f.depth()..n-1.
TreeFunction extend_constant(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, std::size_t n);

// All functions on levels 0..K that agree with f on 0..N, with g where g is
// given, and are harmonic on 0..K-1. E must be finite and |E|^unknowns at
// most `cap`.
std::vector<TreeFunction> brute_force_extensions(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f,
                                                 std::size_t target, const SlotTargets& g, const Integer& cap = Integer(1) << 24);

// Harmonic function on levels 0..h.level with omega_{h.level} = h, values
// above propagated by the harmonic equation.
TreeFunction harmonic_from_level(const WeightedTree& t, const ValueSpace& space, const StepFunction& h);

}  // namespace htlab
