// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>

#include "../support/generators.hpp"

using namespace htlab;
using testing::error_of;

namespace {

// Oracle: r_k = 2k - popcount(k).
std::uint64_t r_popcount(std::uint64_t k) { return 2 * k - static_cast<std::uint64_t>(std::popcount(k)); }

// Oracle: lower and upper proxies by a plain rescan of every prefix.
std::pair<Rational, Rational> slow_density(const std::vector<std::uint64_t>& s, std::uint64_t W) {
  Rational lo(2), hi(-1);
  for (std::uint64_t N = (W + 1) / 2; N <= W; ++N) {
    unsigned long c = 0;
    for (auto x : s)
      if (x <= N) ++c;
    Rational d(c, static_cast<unsigned long>(N + 1));
    d.canonicalize();
    lo = std::min<Rational>(lo, d);
    hi = std::max<Rational>(hi, d);
  }
  return {lo, hi};
}

}  // namespace

TEST_CASE("ell and r examples") {
  CHECK(ell(1) == 1);
  CHECK(ell(6) == 2);
  CHECK(ell(8) == 4);
  CHECK(r_of(2) == 3);
  CHECK(r_of(3) == 4);
  CHECK(r_of(4) == 7);
  CHECK(r_of(0) == 0);
  CHECK(count_ell(2, 1) == 2);
  CHECK(count_ell(3, 3) == 1);
  CHECK(count_ell(4, 2) == 4);
  CHECK(error_of([] { ell(0); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([] { count_ell(3, 4); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("schedule matches the popcount closed form") {
  Schedule s = make_schedule(5000);
  for (std::uint64_t k = 1; k <= 5000; ++k) {
    CHECK(s.r[k - 1] == r_popcount(k));
    CHECK(s.ell[k - 1] == static_cast<std::uint32_t>(std::countr_zero(k)) + 1);
  }
  for (std::uint64_t k : {1ull, 2ull, 77ull, 1023ull, 123456ull}) CHECK(r_of(k) == r_popcount(k));
  Schedule four = make_schedule(4);
  CHECK(four.r == std::vector<std::uint64_t>{1, 3, 4, 7});
}

TEST_CASE("schedule identities") {
  for (unsigned n = 0; n <= 20; ++n) CHECK(r_of(std::uint64_t{1} << n) == (std::uint64_t{1} << (n + 1)) - 1);
  for (unsigned n = 1; n <= 14; ++n)
    for (unsigned m = 1; m <= n; ++m) CHECK(count_ell(n, m) == std::uint64_t{1} << (n - m));
}

TEST_CASE("density proxies") {
  std::vector<std::uint64_t> all;
  for (std::uint64_t i = 0; i <= 100; ++i) all.push_back(i);
  auto d = density(all, 100, "all");
  CHECK(d.lower == 1);
  CHECK(d.upper == 1);
  CHECK(d.hits == 101);

  Schedule s = make_schedule(400);
  for (std::uint32_t m = 1; m <= 4; ++m) {
    auto set = r_values_with_ell(s, m, 600);
    auto rep = density(set, 600);
    auto [lo, hi] = slow_density(set, 600);
    CHECK(rep.lower == lo);
    CHECK(rep.upper == hi);
    CHECK(rep.lower <= rep.upper);
    CHECK(rep.lower_at >= 300);
    CHECK(rep.upper_at <= 600);
  }
  auto counts = running_counts({0, 2, 2, 5}, 6);
  CHECK(counts == std::vector<std::uint64_t>{1, 1, 3, 3, 3, 4, 4});
  CHECK(error_of([] { density({3, 1}, 10); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("density of target classes approaches 2^-(m+1)") {
  const std::uint64_t W = 1000000;
  Schedule s = make_schedule(W / 2 + 1);
  for (std::uint32_t m = 1; m <= 5; ++m) {
    auto rep = density(r_values_with_ell(s, m, W), W);
    double want = std::ldexp(1.0, -static_cast<int>(m + 1));
    CHECK(std::abs(rep.lower.get_d() - want) <= 0.01);
    CHECK(rep.lower > 0);
  }
}

TEST_CASE("extend_lemma43") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(8, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  TreeFunction phi = harmonic_from_level(t, e, StepFunction{1, {e.unit(), e.zero()}});
  for (std::size_t n = 1; n <= 4; ++n) {
    StepFunction h = dense_target(t, e, 5 + n);
    auto r = extend_lemma43(t, e, phi, n, h);
    CHECK(r.F.depth() == 1 + n);
    CHECK(r.achieved == dP(t, e, omega(r.F, 1 + n), h));
    CHECK(r.achieved < Real(pow2_neg(static_cast<unsigned>(n))));
    CHECK(r.achieved <= Real(pow2_neg(static_cast<unsigned>(n + 1))));  // discrete: d/(1+d) <= 1/2
    CHECK(is_harmonic(t, e, r.F).ok);
  }
  CHECK(error_of([&] { extend_lemma43(t, e, phi, 8, dense_target(t, e, 0)); }) == ErrorCode::DepthExhausted);

  FieldSpec q = FieldSpec::rational();
  TreeConfig c = TreeConfig::uniform(6, 2, q);
  c.w = TreeConfig::FromQ{};
  auto tq = build_tree(c);
  ValueSpace eq(q, 1, Metric::SupAbs);
  TreeFunction base = harmonic_from_level(tq, eq, StepFunction{2, {eq.unit(), eq.zero(), eq.zero(), eq.unit()}});
  auto same = extend_lemma43(tq, eq, base, 3, refine(tq, omega(base, 2), 5));
  CHECK(same.achieved == Real(0));
}

TEST_CASE("frequent build on GF(2), D = 14") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(14, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  FrequentOptions opt;
  opt.horizon = 7;  // r_7 = 11, r_8 = 15 > 14
  auto r = build_frequent(t, e, constant_function(e.zero(), 0), opt);
  CHECK(r.complete);
  REQUIRE(r.hits.size() == 7);
  CHECK(verify_frequent(t, e, r).empty());
  for (const auto& h : r.hits) {
    CHECK(h.index == r_popcount(h.k));
    CHECK(h.achieved < Real(pow2_neg(h.ell)));
  }
  for (std::uint32_t m = 1; m <= 3; ++m) {
    std::vector<std::uint64_t> got, want;
    for (const auto& h : r.hits)
      if (h.ell == m) got.push_back(h.index);
    for (std::uint64_t k = 1; k <= 7; ++k)
      if (ell(k) == m) want.push_back(r_popcount(k));
    CHECK(got == want);
  }

  FrequentOptions over = opt;
  over.horizon = 9;
  auto p = build_frequent(t, e, constant_function(e.zero(), 0), over);
  CHECK_FALSE(p.complete);
  CHECK(p.hits.size() == 7);
  CHECK(p.message.find("k = 8") != std::string::npos);
}

TEST_CASE("frequent build from a deeper seed pads to the schedule") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(14, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  TreeFunction phi = harmonic_from_level(t, e, StepFunction{2, {e.unit(), e.zero(), e.unit(), e.unit()}});
  FrequentOptions opt;
  opt.horizon = 7;
  auto r = build_frequent(t, e, phi, opt);
  CHECK(r.first_stage == 3);  // r_2 = 3 is the first r_{k-1} >= 2
  CHECK(r.padded_to == 3);
  REQUIRE_FALSE(r.hits.empty());
  CHECK(r.hits.front().k == 3);
  CHECK(verify_frequent(t, e, r).empty());
  for (std::size_t n = 0; n <= 2; ++n)
    for (std::uint64_t i = 0; i < t.level_size(n); ++i) CHECK(e.equal(r.F.value(t, {n, i}), phi.value(t, {n, i})));
}

TEST_CASE("frequent build on a level subset") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(14, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  FrequentOptions opt;
  opt.horizon = 4;

  std::vector<std::size_t> all;
  for (std::size_t n = 0; n <= 14; ++n) all.push_back(n);
  auto a = build_frequent(t, e, constant_function(e.zero(), 0), opt);
  auto b = build_frequent_tau(t, e, all, constant_function(e.zero(), 0), opt);
  REQUIRE(a.hits.size() == b.hits.size());
  for (std::size_t i = 0; i < a.hits.size(); ++i) {
    CHECK(a.hits[i].level == b.hits[i].level);
    CHECK(a.hits[i].achieved == b.hits[i].achieved);
  }
  for (std::size_t n = 0; n <= 14; ++n) {
    StepFunction x = omega(a.F, n), y = omega(b.F, n);
    CHECK(same_boundary_function(t, e, x, y));
  }

  std::vector<std::size_t> even;
  for (std::size_t n = 0; n <= 14; n += 2) even.push_back(n);
  WeightedTree tc = collapse(t, even);
  for (std::uint64_t i = 0; i < tc.level_size(1); ++i) CHECK(tc.q({1, i}) == Rational(1, 4));
  auto r = build_frequent_tau(t, e, even, constant_function(e.zero(), 0), opt);
  REQUIRE_FALSE(r.hits.empty());
  for (const auto& h : r.hits) {
    CHECK(h.level % 2 == 0);
    CHECK(h.level == even[h.index]);
  }
  CHECK(verify_frequent(t, e, r).empty());
  CHECK(is_harmonic(t, e, r.F).ok);
}

TEST_CASE("hold builder rejects weights that do not sum to one") {
  FieldSpec g2 = FieldSpec::gf2();
  auto t = build_tree(TreeConfig::uniform(10, 2, g2));
  ValueSpace e(g2, 1, Metric::Discrete);
  XOptions opt;
  opt.balls = {Ball{dense_target(t, e, 0), Rational(1, 2)}};
  CHECK(error_of([&] { build_X(t, e, constant_function(e.zero(), 0), opt); }) == ErrorCode::Validation);
}

TEST_CASE("hold builder over the rationals") {
  FieldSpec q = FieldSpec::rational();
  TreeConfig c = TreeConfig::uniform(64, 2, q);
  c.w = TreeConfig::FromQ{};
  c.materialize = 16;
  auto t = build_tree(c);
  ValueSpace e(q, 1, Metric::SupAbs);
  XOptions opt;
  opt.balls = {Ball{dense_target(t, e, 1), Rational(1, 2)}, Ball{dense_target(t, e, 2), Rational(1, 2)}};
  auto r = build_X(t, e, constant_function(e.zero(), 0), opt);
  REQUIRE(r.balls.size() == 2);
  CHECK(r.F.depth() == 64);
  for (const auto& v : r.visits) {
    CHECK(v.hold_verified);
    CHECK(v.achieved < Real(opt.balls[v.ball].radius));
    // Oracle: each level of the hold is inside the ball.
    std::size_t stop = std::min(v.hold_end, v.hit_level + 3);
    for (std::size_t n = v.hit_level; n <= stop; ++n) CHECK(in_ball(t, e, omega(r.F, n), opt.balls[v.ball]));
  }
  for (const auto& b : r.balls) {
    CHECK(b.density.upper >= Rational(4, 5));
    CHECK_FALSE(b.members.empty());
  }

  // A single ball whose last hold runs from level F for k levels: the
  // upper proxy at the window end is at least k/(F+k).
  XOptions one;
  one.balls = {opt.balls[0]};
  auto s = build_X(t, e, constant_function(e.zero(), 0), one);
  REQUIRE_FALSE(s.visits.empty());
  const auto& v = s.visits.back();
  CHECK(s.balls[0].window == v.hold_end);
  Rational k(static_cast<unsigned long>(v.hold_end - v.hit_level), 1);
  CHECK(s.balls[0].density.upper >= k / (Rational(static_cast<unsigned long>(v.hit_level)) + k));
}
