// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/generators.hpp"

using namespace htlab;
using testing::error_of;

namespace {

struct Binary {
  FieldSpec f = FieldSpec::gf2();
  WeightedTree t = build_tree(TreeConfig::uniform(4, 2, FieldSpec::gf2()));
  ValueSpace e{FieldSpec::gf2(), 1, Metric::Discrete};

  StepFunction bits(std::size_t level, std::vector<int> v) const {
    StepFunction h{level, {}};
    for (int b : v) h.values.push_back(e.make({f.from_int(b)}));
    return h;
  }
};

// Oracle: sum over the deepest level of P(B_x) d/(1+d), looking values up
// through explicit parent walks.
Rational slow_dP(const WeightedTree& t, const ValueSpace& e, const StepFunction& h, const StepFunction& g, std::size_t L) {
  Rational total(0);
  for (std::uint64_t i = 0; i < t.level_size(L); ++i) {
    VertexRef x{L, i}, a = x, b = x;
    while (a.level > h.level) a = t.parent(a);
    while (b.level > g.level) b = t.parent(b);
    total += t.sector_prob(x) * e.bounded_metric(h.values[a.index], g.values[b.index]).exact();
  }
  return total;
}

}  // namespace

TEST_CASE("refine and omega") {
  Binary b;
  StepFunction c = b.bits(0, {1});
  StepFunction r = refine(b.t, c, 2);
  CHECK(r.level == 2);
  REQUIRE(r.values.size() == 4);
  for (const auto& v : r.values) CHECK(b.e.equal(v, c.values[0]));
  StepFunction h = b.bits(1, {0, 1});
  StepFunction same = refine(b.t, h, 1);
  for (std::size_t i = 0; i < 2; ++i) CHECK(b.e.equal(same.values[i], h.values[i]));
  CHECK(dP(b.t, b.e, h, refine(b.t, h, 4)) == Real(0));
  CHECK(error_of([&] { refine(b.t, h, 0); }) == ErrorCode::InvalidArgument);

  TreeFunction f(2, {{b.e.unit()}, {b.e.unit(), b.e.zero()}, {b.e.zero(), b.e.unit(), b.e.zero(), b.e.zero()}});
  StepFunction o0 = omega(f, 0);
  CHECK(o0.level == 0);
  CHECK(b.e.equal(o0.values[0], b.e.unit()));
  CHECK(omega(f, 2).values.size() == 4);
  TreeFunction z = constant_function(b.e.zero(), 3);
  for (std::size_t n = 0; n <= 3; ++n)
    for (const auto& v : omega(z, n).values) CHECK(b.e.is_zero(v));
  CHECK(error_of([&] { omega(f, 3); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("dP examples") {
  Binary b;
  StepFunction h = b.bits(2, {0, 0, 0, 0});
  CHECK(dP(b.t, b.e, h, h) == Real(0));
  CHECK(dP(b.t, b.e, h, b.bits(2, {0, 0, 1, 0})) == Real(Rational(1, 8)));
  CHECK(dP(b.t, b.e, h, b.bits(2, {1, 1, 1, 1})) == Real(Rational(1, 2)));
  CHECK(dP(b.t, b.e, b.bits(1, {0, 1}), b.bits(2, {0, 1, 1, 1})) == Real(Rational(1, 8)));
}

TEST_CASE("dP agrees with a direct sum and is refinement invariant") {
  testing::Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    FieldSpec f = FieldSpec::gfp(3);
    auto t = build_tree(testing::random_tree_config(rng, 5, f));
    ValueSpace e(f, 2, Metric::Hamming);
    std::size_t a = testing::uniform(rng, 0, 4), c = testing::uniform(rng, 0, 4);
    StepFunction h = testing::random_step(rng, t, e, a), g = testing::random_step(rng, t, e, c);
    std::size_t L = std::max(a, c);
    Real d = dP(t, e, h, g);
    CHECK(d == Real(slow_dP(t, e, h, g, L)));
    std::size_t m = testing::uniform(rng, L, 5);
    CHECK(dP(t, e, refine(t, h, m), refine(t, g, m)) == d);
    CHECK(dP(t, e, g, h) == d);
  }
}

TEST_CASE("same_boundary_function and in_ball") {
  Binary b;
  StepFunction h = b.bits(1, {0, 1});
  CHECK(same_boundary_function(b.t, b.e, h, b.bits(2, {0, 0, 1, 1})));
  CHECK_FALSE(same_boundary_function(b.t, b.e, h, b.bits(2, {0, 1, 1, 1})));
  Ball ball{b.bits(0, {0}), Rational(1, 4)};
  CHECK(in_ball(b.t, b.e, b.bits(2, {0, 0, 0, 1}), ball));
  CHECK_FALSE(in_ball(b.t, b.e, b.bits(1, {0, 1}), ball));
  ball.radius = Rational(1, 8);
  CHECK_FALSE(in_ball(b.t, b.e, b.bits(2, {0, 0, 0, 1}), ball));  // strict
}

TEST_CASE("Monte Carlo estimate tracks the exact value") {
  testing::Rng rng(99);
  const std::uint64_t N = 10000;
  for (int trial = 0; trial < 5; ++trial) {
    FieldSpec f = FieldSpec::gfp(5);
    auto t = build_tree(testing::random_tree_config(rng, 6, f));
    ValueSpace e(f, 1, Metric::Discrete);
    StepFunction h = testing::random_step(rng, t, e, 6), g = testing::random_step(rng, t, e, 3);
    double exact = dP(t, e, h, g).approx();
    std::mt19937_64 mc(trial);
    double est = dP_monte_carlo(t, e, h, g, N, mc);
    CHECK(std::abs(est - exact) < 4.0 / std::sqrt(static_cast<double>(N)));
  }
}

TEST_CASE("dense targets") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(3, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  StepFunction h0 = dense_target(t, e, 0);
  CHECK(h0.level == 0);
  CHECK(e.is_zero(h0.values[0]));

  // Levels 0 and 1 contribute 2 + 4 step functions before level 2 starts.
  std::set<std::vector<std::uint64_t>> level0, level1;
  std::size_t first_level2 = 0;
  for (std::uint64_t j = 0; j < 40; ++j) {
    StepFunction h = dense_target(t, e, j);
    std::vector<std::uint64_t> key;
    for (const auto& v : h.values) key.push_back(v.coords[0].residue());
    if (h.level == 0) level0.insert(key);
    if (h.level == 1) {
      level1.insert(key);
      CHECK(j <= 6);
    }
    if (h.level == 2 && first_level2 == 0) first_level2 = j;
  }
  CHECK(level0.size() == 2);
  CHECK(level1.size() == 4);  // every level-1 step function, all at j <= 6
  CHECK(first_level2 > 0);

  auto limit = dense_target_limit(t, e);
  CHECK_NOTHROW(dense_target(t, e, limit.get_ui()));
  CHECK(error_of([&] { dense_target(t, e, limit.get_ui() + 1); }) == ErrorCode::DepthExhausted);
}

TEST_CASE("perturb_nonisolated") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(4, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  StepFunction h = dense_target(t, e, 3);
  StepFunction g = perturb_nonisolated(t, e, h, Rational(1, 4));
  Real d = dP(t, e, h, g);
  CHECK(d > Real(0));
  CHECK(d <= Real(Rational(1, 16)));
  CHECK(dP(t, e, h, perturb_nonisolated(t, e, h, Rational(2))) > Real(0));
  CHECK(error_of([&] { perturb_nonisolated(t, e, h, Rational(1, 1024)); }) == ErrorCode::DepthExhausted);
  ValueSpace z(g2, 0, Metric::Discrete);
  CHECK(error_of([&] { perturb_nonisolated(t, z, StepFunction{0, {z.zero()}}, Rational(1, 4)); }) == ErrorCode::InvalidArgument);

  testing::Rng rng(8);
  auto deep = build_tree(TreeConfig::uniform(10, 2, g2));
  for (int i = 0; i < 20; ++i) {
    StepFunction r = testing::random_step(rng, deep, e, testing::uniform(rng, 0, 6));
    Rational eps(static_cast<long>(testing::uniform(rng, 1, 256)), 256);
    Real dd = dP(deep, e, r, perturb_nonisolated(deep, e, r, eps));
    CHECK(dd > Real(0));
    CHECK(dd < Real(eps));
  }
}
