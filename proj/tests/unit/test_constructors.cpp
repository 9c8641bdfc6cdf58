// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <algorithm>

#include "../support/generators.hpp"

using namespace htlab;
using testing::error_of;

namespace {

struct Gf2Binary {
  FieldSpec f = FieldSpec::gf2();
  WeightedTree t;
  ValueSpace e{FieldSpec::gf2(), 1, Metric::Discrete};
  explicit Gf2Binary(std::size_t D) : t(build_tree(TreeConfig::uniform(D, 2, FieldSpec::gf2()))) {}
};

}  // namespace

TEST_CASE("in_E_set") {
  Gf2Binary b(3);
  TreeFunction f = harmonic_from_level(b.t, b.e, StepFunction{2, {b.e.unit(), b.e.zero(), b.e.zero(), b.e.unit()}});
  StepFunction h = omega(f, 2);
  for (int s = 1; s < 50; s += 7) CHECK(in_E_set(b.t, b.e, f, 2, h, Integer(s)));
  StepFunction g = h;
  g.values[0] = b.e.zero();  // one sector of measure 1/4 -> dP = 1/8
  CHECK_FALSE(in_E_set(b.t, b.e, f, 2, g, Integer(8)));
  CHECK(in_E_set(b.t, b.e, f, 2, g, Integer(7)));
  StepFunction g3 = refine(b.t, h, 3);
  g3.values[5] = b.e.is_zero(g3.values[5]) ? b.e.unit() : b.e.zero();  // measure 1/8 -> dP = 1/16
  CHECK(in_E_set(b.t, b.e, f, 2, g3, Integer(10)));
  CHECK_FALSE(in_E_set(b.t, b.e, f, 2, g3, Integer(16)));
  CHECK(error_of([&] { in_E_set(b.t, b.e, f, 2, h, Integer(0)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("trivial universal build") {
  Gf2Binary b(4);
  UniversalOptions opt;
  opt.J = 1;
  auto r = build_universal(b.t, b.e, constant_function(b.e.zero(), 0), opt);
  REQUIRE(r.complete);
  CHECK(r.certificate[0].achieved == Real(0));
  for (std::size_t n = 0; n <= 4; ++n)
    for (const auto& v : omega(r.F, n).values) CHECK(b.e.is_zero(v));
}

TEST_CASE("universal build over GF(2), D = 12, J = 4") {
  Gf2Binary b(12);
  TreeFunction phi = harmonic_from_level(b.t, b.e, StepFunction{1, {b.e.unit(), b.e.zero()}});
  UniversalOptions opt;
  opt.J = 4;
  auto r = build_universal(b.t, b.e, phi, opt);
  REQUIRE(r.complete);
  REQUIRE(r.certificate.size() == 4);
  CHECK(verify_certificate(b.t, b.e, r).empty());
  for (const auto& e : r.certificate) {
    CHECK(e.achieved < Real(Rational(1, static_cast<unsigned long>(e.j))));
    CHECK(e.bound == Rational(1, static_cast<unsigned long>(e.j)));
    // independent recomputation against dense_target(j - 1)
    CHECK(dP(b.t, b.e, omega(r.F, e.level), dense_target(b.t, b.e, e.j - 1)) == e.achieved);
  }
  CHECK(r.F.depth() == 12);
  CHECK(is_harmonic(b.t, b.e, materialize(b.t, r.F, 12)).ok);
  for (std::size_t n = 0; n <= 1; ++n)
    for (std::uint64_t i = 0; i < b.t.level_size(n); ++i) CHECK(b.e.equal(r.F.value(b.t, {n, i}), phi.value(b.t, {n, i})));
}

TEST_CASE("a level subset constrains every hit level") {
  Gf2Binary b(14);
  UniversalOptions opt;
  opt.J = 4;
  for (std::size_t n = 0; n <= 14; n += 2) opt.tau.push_back(n);
  auto r = build_universal(b.t, b.e, constant_function(b.e.zero(), 0), opt);
  REQUIRE(r.complete);
  for (const auto& e : r.certificate) CHECK(e.level % 2 == 0);
  CHECK(verify_certificate(b.t, b.e, r).empty());
}

TEST_CASE("depth exhaustion yields a partial certificate") {
  Gf2Binary b(5);
  UniversalOptions opt;
  opt.J = 8;
  auto r = build_universal(b.t, b.e, constant_function(b.e.zero(), 0), opt);
  CHECK_FALSE(r.complete);
  CHECK(r.certificate.size() < 8);
  CHECK(r.message.find("largest achievable J") != std::string::npos);
  CHECK(verify_certificate(b.t, b.e, r).empty());
}

TEST_CASE("non-harmonic seeds are rejected") {
  Gf2Binary b(6);
  TreeFunction bad(1, {{b.e.unit()}, {b.e.unit(), b.e.unit()}});
  UniversalOptions opt;
  CHECK(error_of([&] { build_universal(b.t, b.e, bad, opt); }) == ErrorCode::Validation);
}

TEST_CASE("verify_certificate notices tampering") {
  Gf2Binary b(10);
  UniversalOptions opt;
  opt.J = 3;
  auto r = build_universal(b.t, b.e, constant_function(b.e.zero(), 0), opt);
  REQUIRE(r.complete);
  r.certificate[1].achieved = Real(Rational(1, 1000));
  CHECK_FALSE(verify_certificate(b.t, b.e, r).empty());
}

TEST_CASE("spanning family over the rationals with w = q") {
  FieldSpec q = FieldSpec::rational();
  TreeConfig c = TreeConfig::uniform(14, 2, q);
  c.q = TreeConfig::PerChild<Rational>{{Rational(1, 16), Rational(15, 16)}};
  c.w = TreeConfig::FromQ{};
  auto t = build_tree(c);
  ValueSpace e(q, 1, Metric::SupAbs);
  StepFunction h = dense_target(t, e, 2);
  FieldElement a2 = q.from_int(2);
  SpanningOptions opt;
  opt.m = 2;
  opt.own_count = 2;
  opt.last_targets = {StepFunction{h.level, {}}};
  for (const auto& v : h.values) opt.last_targets[0].values.push_back(e.scale(a2.inv(), v));
  opt.last_target_names = {"h/2"};
  auto fam = build_spanning_family(t, e, opt);
  REQUIRE(fam.members.size() == 2);
  REQUIRE(fam.tau.size() == 3);
  CHECK_FALSE(fam.tau[1].empty());
  CHECK_FALSE(fam.tau[2].empty());
  for (auto n : fam.tau[2]) CHECK(std::binary_search(fam.tau[1].begin(), fam.tau[1].end(), n));
  CHECK(fam.tau[2].size() < fam.tau[1].size());

  for (std::size_t k = 0; k < 2; ++k) {
    const auto& mem = fam.members[k];
    CHECK(is_harmonic(t, e, materialize(t, mem.f, std::min(mem.f.depth(), t.materialized_depth()))).ok);
    CHECK(mem.rho < Real(Rational(1, static_cast<unsigned long>(k + 1))));
    for (auto n : fam.tau[k + 1]) CHECK(dP(t, e, omega(mem.f, n), constant_step(e.zero())) < Real(opt.stage_tolerance));
  }

  std::vector<FieldElement> coeffs{q.from_int(3), a2};
  auto w = verify_span(t, e, fam, coeffs, h, Rational(1, 4));
  CHECK(w.found);
  CHECK(w.distance < Real(Rational(1, 4)));
  CHECK(check_linearity(t, e, fam, coeffs).empty());
  CHECK(error_of([&] { verify_span(t, e, fam, {q.one(), q.zero()}, h, Rational(1, 4)); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("a one-member family hits its own targets") {
  Gf2Binary b(12);
  SpanningOptions opt;
  opt.m = 1;
  StepFunction h = dense_target(b.t, b.e, 4);
  opt.last_targets = {h};
  opt.last_target_names = {"dense:4"};
  auto fam = build_spanning_family(b.t, b.e, opt);
  REQUIRE(fam.members.size() == 1);
  const auto& stages = fam.members[0].stages;
  REQUIRE_FALSE(stages.empty());
  CHECK_FALSE(stages[0].zero);
  auto w = verify_span(b.t, b.e, fam, {b.f.one()}, h, fam.stage_tolerance);
  REQUIRE(w.found);
  CHECK(w.level <= stages[0].level);
  CHECK(dP(b.t, b.e, omega(fam.members[0].f, stages[0].level), h) < Real(fam.stage_tolerance));
}
