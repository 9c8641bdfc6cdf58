// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Random instances shared by the unit and acceptance tests.

#pragma once

#include <optional>
#include <random>
#include <vector>

#include "core/error.hpp"
#include "core/frequency.hpp"

namespace htlab::testing {

using Rng = std::mt19937_64;

// Code of the htlab::Error thrown by f, or nullopt when f returns.
template <class F>
std::optional<ErrorCode> error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

inline std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

// Positive integers a_i in [1, 9] normalised to sum to one.
inline std::vector<Rational> random_row(Rng& rng, std::size_t k) {
  std::vector<unsigned long> a(k);
  unsigned long total = 0;
  for (auto& x : a) {
    x = uniform(rng, 1, 9);
    total += x;
  }
  std::vector<Rational> q;
  for (auto x : a) {
    Rational r(x, total);
    r.canonicalize();
    q.push_back(r);
  }
  return q;
}

inline FieldElement random_element(Rng& rng, const FieldSpec& f) {
  if (f.is_prime_field()) return f.from_int(static_cast<std::int64_t>(uniform(rng, 0, f.modulus() - 1)));
  long num = static_cast<long>(uniform(rng, 0, 20)) - 10;
  long den = static_cast<long>(uniform(rng, 1, 7));
  return f.from_rational(Rational(num, den));
}

inline FieldElement random_nonzero(Rng& rng, const FieldSpec& f) {
  for (;;) {
    FieldElement e = random_element(rng, f);
    if (!e.is_zero()) return e;
  }
}

// Explicit tree: 2 or 3 children per vertex (3 only while levels are small),
// random q rows, random nonzero weights (or w = q when `w_from_q`).
inline TreeConfig random_tree_config(Rng& rng, std::size_t depth, const FieldSpec& f, bool w_from_q = false, std::uint32_t max_branch = 3) {
  TreeConfig c;
  c.depth = depth;
  c.field = f;
  TreeConfig::ExplicitChildren counts;
  TreeConfig::PerEdge<Rational> q;
  TreeConfig::PerEdge<FieldElement> w;
  std::uint64_t level = 1;
  for (std::size_t n = 0; n < depth; ++n) {
    std::uint64_t next = 0;
    for (std::uint64_t i = 0; i < level; ++i) {
      std::uint32_t b = (level < 64 && max_branch > 2) ? static_cast<std::uint32_t>(uniform(rng, 2, max_branch)) : 2;
      counts.counts.push_back(b);
      auto row = random_row(rng, b);
      for (auto& r : row) {
        q.values.push_back(r);
        w.values.push_back(w_from_q ? f.from_rational(r) : random_nonzero(rng, f));
      }
      next += b;
    }
    level = next;
  }
  c.branching = counts;
  c.q = q;
  if (w_from_q)
    c.w = TreeConfig::FromQ{};
  else
    c.w = w;
  return c;
}

inline Vector random_vector(Rng& rng, const ValueSpace& space) {
  std::vector<FieldElement> coords;
  for (std::size_t i = 0; i < space.dim(); ++i) coords.push_back(random_element(rng, space.field()));
  return space.make(std::move(coords));
}

inline StepFunction random_step(Rng& rng, const WeightedTree& t, const ValueSpace& space, std::size_t level) {
  StepFunction h{level, {}};
  for (std::uint64_t i = 0; i < t.level_size(level); ++i) h.values.push_back(random_vector(rng, space));
  return h;
}

// Levels 0..n with every value drawn at random (not harmonic in general).
inline TreeFunction random_function(Rng& rng, const WeightedTree& t, const ValueSpace& space, std::size_t n) {
  std::vector<std::vector<Vector>> levels;
  for (std::size_t m = 0; m <= n; ++m) levels.push_back(random_step(rng, t, space, m).values);
  return TreeFunction(n, std::move(levels));
}

struct SolverInstance {
  WeightedTree t;
  ValueSpace e;
  TreeFunction f;
  FreeSlots slots;
  SlotTargets g;
  std::size_t unknowns = 0;  // values the exhaustive search has to choose
};

// Extension problem: harmonic base to level N, a random slot below each
// base vertex, random targets elsewhere on level K = N + 1..N + 4. Trees
// mix binary and ternary vertices and are redrawn until at most
// `max_unknowns` vertex values are free.
inline SolverInstance random_solver_instance(Rng& rng, const FieldSpec& field, std::size_t dim, std::size_t max_unknowns = 24) {
  for (;;) {
    std::size_t N = uniform(rng, 0, 2), K = N + uniform(rng, 1, 4);
    auto t = build_tree(random_tree_config(rng, K, field, false, static_cast<std::uint32_t>(uniform(rng, 2, 3))));
    std::size_t unknowns = t.level_size(N);
    for (std::size_t j = N + 1; j < K; ++j) unknowns += t.level_size(j);
    if (unknowns * dim > max_unknowns) continue;
    ValueSpace e(field, dim, Metric::Hamming);
    TreeFunction f = harmonic_from_level(t, e, random_step(rng, t, e, N));
    FreeSlots s{N, K, {}};
    for (std::uint64_t i = 0; i < t.level_size(N); ++i) {
      auto [lo, hi] = t.descendants({N, i}, K);
      s.beta.push_back(uniform(rng, lo, hi - 1));
    }
    SlotTargets g(t.level_size(K));
    for (std::uint64_t y = 0; y < g.size(); ++y) g[y] = random_vector(rng, e);
    for (auto b : s.beta) g[b].reset();
    return SolverInstance{std::move(t), e, std::move(f), std::move(s), std::move(g), unknowns * dim};
  }
}

}  // namespace htlab::testing
