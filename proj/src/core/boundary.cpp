// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/boundary.hpp"

#include <algorithm>
#include <map>

#include "core/error.hpp"

namespace htlab {

namespace {

// For every vertex of T_L, the index of its ancestor in T_a.
std::vector<std::uint64_t> ancestor_map(const WeightedTree& t, std::size_t a, std::size_t L) {
  std::vector<std::uint64_t> map(t.level_size(L));
  std::uint64_t na = t.level_size(a);
  for (std::uint64_t i = 0; i < na; ++i) {
    auto [lo, hi] = t.descendants({a, i}, L);
    std::fill(map.begin() + static_cast<std::ptrdiff_t>(lo), map.begin() + static_cast<std::ptrdiff_t>(hi), i);
  }
  return map;
}

void require_level(const WeightedTree& t, std::size_t n) {
  if (n > t.depth()) fail(ErrorCode::InvalidArgument, "level " + std::to_string(n) + " exceeds tree depth " + std::to_string(t.depth()));
  if (n > t.materialized_depth())
    fail(ErrorCode::DepthExhausted, "level " + std::to_string(n) + " is not stored (stored through " + std::to_string(t.materialized_depth()) + ")");
}

// Visits the blocks of the dense enumeration in order until `visit` returns
// true. Throws when a block needs an unstored level, reporting the number of
// step functions enumerated before it.
template <class Visit>
void walk_blocks(const WeightedTree& t, const ValueSpace& space, Visit visit) {
  auto e_size = space.size();
  Integer before(0);
  for (std::size_t s = 0;; ++s) {
    for (std::size_t n = 0; n <= s; ++n) {
      std::uint64_t g = s - n + 1;
      if (e_size && g > *e_size) continue;
      if (n > t.materialized_depth() || n > t.depth()) {
        Integer last = before - 1;
        fail(ErrorCode::DepthExhausted, "dense enumeration needs level " + std::to_string(n) + "; the largest usable index is " + last.get_str());
      }
      Integer size = max_block_size(g - 1, t.level_size(n));
      if (visit(n, g, size, before)) return;
      before += size;
    }
  }
}

}  // namespace

void check_step(const WeightedTree& t, const ValueSpace& space, const StepFunction& h) {
  require_level(t, h.level);
  if (h.values.size() != t.level_size(h.level))
    fail(ErrorCode::InvalidArgument, "step function at level " + std::to_string(h.level) + " has " + std::to_string(h.values.size()) +
                                         " values for " + std::to_string(t.level_size(h.level)) + " sectors");
  for (const auto& v : h.values) space.check(v);
}

StepFunction constant_step(const Vector& v) { return StepFunction{0, {v}}; }

StepFunction refine(const WeightedTree& t, const StepFunction& h, std::size_t m) {
  if (m < h.level) fail(ErrorCode::InvalidArgument, "refine to level " + std::to_string(m) + " below level " + std::to_string(h.level));
  require_level(t, m);
  if (m == h.level) return h;
  auto map = ancestor_map(t, h.level, m);
  StepFunction r{m, {}};
  r.values.reserve(map.size());
  for (auto a : map) r.values.push_back(h.values[a]);
  return r;
}

StepFunction omega(const TreeFunction& f, std::size_t n) {
  if (n > f.depth()) fail(ErrorCode::InvalidArgument, "omega: level " + std::to_string(n) + " beyond the function's depth " + std::to_string(f.depth()));
  std::size_t m = std::min(n, f.explicit_depth());
  return StepFunction{m, f.level(m)};
}

Real dP(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const StepFunction& g) {
  std::size_t L = std::max(h.level, g.level);
  require_level(t, L);
  auto hm = ancestor_map(t, h.level, L);
  auto gm = ancestor_map(t, g.level, L);
  // Sector masses grouped by the pair of values they compare.
  std::map<std::pair<std::uint64_t, std::uint64_t>, Rational> mass;
  for (std::uint64_t x = 0; x < hm.size(); ++x) mass[{hm[x], gm[x]}] += t.sector_prob({L, x});
  Real total(0);
  for (const auto& [pair, p] : mass) {
    Real b = space.bounded_metric(h.values[pair.first], g.values[pair.second]);
    if (b.is_exact() && b.exact() == 0) continue;
    total += Real(p) * b;
  }
  return total;
}

bool same_boundary_function(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const StepFunction& g) {
  std::size_t L = std::max(h.level, g.level);
  auto hm = ancestor_map(t, h.level, L);
  auto gm = ancestor_map(t, g.level, L);
  for (std::uint64_t x = 0; x < hm.size(); ++x)
    if (!space.equal(h.values[hm[x]], g.values[gm[x]])) return false;
  return true;
}

bool in_ball(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const Ball& b) {
  return dP(t, space, h, b.center) < Real(b.radius);
}

double dP_monte_carlo(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const StepFunction& g,
                      std::uint64_t samples, std::mt19937_64& rng) {
  if (samples == 0) fail(ErrorCode::InvalidArgument, "Monte Carlo needs at least one sample");
  std::size_t L = std::max(h.level, g.level);
  require_level(t, L);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double acc = 0.0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    VertexRef v{0, 0};
    std::uint64_t hi = 0, gi = 0;
    while (v.level < L) {
      double u = unit(rng), cum = 0.0;
      std::uint32_t c = t.child_count(v);
      VertexRef next = t.child(v, c - 1);
      for (std::uint32_t k = 0; k + 1 < c; ++k) {
        VertexRef y = t.child(v, k);
        cum += t.q(y).get_d();
        if (u < cum) {
          next = y;
          break;
        }
      }
      v = next;
      if (v.level == h.level) hi = v.index;
      if (v.level == g.level) gi = v.index;
    }
    acc += space.bounded_metric(h.values[hi], g.values[gi]).approx();
  }
  return acc / static_cast<double>(samples);
}

StepFunction dense_target(const WeightedTree& t, const ValueSpace& space, std::uint64_t j) {
  Integer target(static_cast<unsigned long>(j));
  StepFunction out;
  walk_blocks(t, space, [&](std::size_t n, std::uint64_t g, const Integer& size, const Integer& before) {
    if (target >= before + size) return false;
    auto digits = decode_max_block(target - before, g - 1, t.level_size(n));
    out.level = n;
    out.values.reserve(digits.size());
    // D_E elements are shared across sectors; decode each index once.
    std::map<std::uint64_t, Vector> cache;
    for (auto d : digits) {
      auto it = cache.find(d);
      if (it == cache.end()) it = cache.emplace(d, space.enumerate_dense(d)).first;
      out.values.push_back(it->second);
    }
    return true;
  });
  return out;
}

Integer dense_target_limit(const WeightedTree& t, const ValueSpace& space) {
  Integer total(0);
  auto e_size = space.size();
  for (std::size_t s = 0;; ++s)
    for (std::size_t n = 0; n <= s; ++n) {
      std::uint64_t g = s - n + 1;
      if (e_size && g > *e_size) continue;
      if (n > t.materialized_depth() || n > t.depth()) return total - 1;
      total += max_block_size(g - 1, t.level_size(n));
    }
}

StepFunction perturb_nonisolated(const WeightedTree& t, const ValueSpace& space, const StepFunction& h, const Rational& eps) {
  if (space.trivial()) fail(ErrorCode::InvalidArgument, "E = {0}: the boundary function space is a single point");
  if (eps <= 0) fail(ErrorCode::InvalidArgument, "eps must be positive");
  check_step(t, space, h);
  std::size_t limit = std::min(t.depth(), t.materialized_depth());
  std::optional<VertexRef> x;
  for (std::size_t n = 1; n <= limit; ++n) {
    VertexRef c = min_prob_descendant(t, {0, 0}, n);
    if (t.sector_prob(c) < eps) {
      x = c;
      break;
    }
  }
  if (!x) fail(ErrorCode::DepthExhausted, "no sector of measure below " + to_string(eps) + " within the stored levels");
  std::size_t L = std::max(h.level, x->level);
  StepFunction g = refine(t, h, L);
  auto [lo, hi] = t.descendants(*x, L);
  for (std::uint64_t i = lo; i < hi; ++i) g.values[i] = space.is_zero(g.values[i]) ? space.unit() : space.zero();
  return g;
}

}  // namespace htlab
