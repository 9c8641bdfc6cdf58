// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Boundary step functions: one value per sector B_x, x in T_n. Comparisons
// refine both operands to the deeper level first, so a step function always
// lives at its natural level.

#pragma once

#include <random>
#include <vector>

#include "core/tree_function.hpp"

namespace htlab {

struct StepFunction {
  std::size_t level = 0;
  std::vector<Vector> values;
};

struct Ball {
  StepFunction center;
  Rational radius;
};

void check_step(const WeightedTree& t, const ValueSpace& space, const StepFunction& h);

StepFunction constant_step(const Vector& v);

// Each level-m vertex takes the value of its level-h.level ancestor.
StepFunction refine(const WeightedTree& t, const StepFunction& h, std::size_t m);

// Level-n slice of f. Levels inside a held tail return the slice of the
// last stored level, which is the same boundary function.
StepFunction omega(const TreeFunction& f, std::size_t n);

// Sum over x in T_L of P(B_x) d/(1+d), L the deeper of the two levels.
Real dP(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const StepFunction& g);

// Equal as boundary functions (every sector has positive measure).
bool same_boundary_function(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const StepFunction& g);

bool in_ball(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const Ball& b);

// Average of d/(1+d) along `samples` random q-walks down to the deeper level.
double dP_monte_carlo(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const StepFunction& g,
                      std::uint64_t samples, std::mt19937_64& rng);

// j-th step function of the fixed dense enumeration. Stage s = 0, 1, ...
// visits levels n = 0..s with grid size g = s - n + 1: the block (n, g)
// lists, lexicographically with vertex 0 most significant, the level-n
// step functions whose values are among the first g elements of D_E and
// use the g-th at least once. Blocks with g > |E| are empty.
// Throws Error(DepthExhausted) naming the largest usable index when the
// enumeration would need a level the tree does not store.
StepFunction dense_target(const WeightedTree& t, const ValueSpace& space, std::uint64_t j);

// Largest j for which dense_target(t, space, j) succeeds.
Integer dense_target_limit(const WeightedTree& t, const ValueSpace& space);

// g differing from h on one sector of measure < eps (0 -> unit vector,
// nonzero -> 0), so 0 < dP(h, g) < eps.
StepFunction perturb_nonisolated(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const Rational& eps);

}  // namespace htlab
