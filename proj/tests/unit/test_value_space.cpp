// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <set>

#include "../support/generators.hpp"

using namespace htlab;
using testing::error_of;

TEST_CASE("metrics on small spaces") {
  FieldSpec g3 = FieldSpec::gfp(3);
  ValueSpace disc(g3, 2, Metric::Discrete), ham(g3, 3, Metric::Hamming);
  Vector a = disc.make({g3.from_int(1), g3.from_int(2)});
  Vector b = disc.make({g3.from_int(1), g3.from_int(0)});
  CHECK(disc.metric(a, a) == Real(0));
  CHECK(disc.metric(a, b) == Real(1));
  CHECK(disc.bounded_metric(a, b) == Real(Rational(1, 2)));

  Vector u = ham.make({g3.from_int(1), g3.from_int(2), g3.zero()});
  Vector v = ham.make({g3.from_int(2), g3.from_int(2), g3.one()});
  // normalized: 2 of 3 coordinates differ
  CHECK(ham.metric(u, v) == Real(Rational(2, 3)));
  CHECK(ham.bounded_metric(u, v) == Real(Rational(2, 5)));
  CHECK(ham.bounded_metric_sup() == Real(Rational(1, 2)));

  FieldSpec q = FieldSpec::rational();
  ValueSpace sup(q, 2, Metric::SupAbs);
  Vector s = sup.make({q.parse("1/2"), q.parse("-3")});
  Vector t = sup.make({q.parse("2"), q.parse("-1")});
  CHECK(sup.metric(s, t) == Real(2));
  CHECK(sup.bounded_metric(s, t) == Real(Rational(2, 3)));
  CHECK(sup.bounded_metric_sup() == Real(1));

  FieldSpec r = FieldSpec::approx_real(1e-9);
  ValueSpace euc(r, 2, Metric::Euclidean);
  Vector e1 = euc.make({r.parse("0"), r.parse("0")}), e2 = euc.make({r.parse("3"), r.parse("4")});
  CHECK(euc.metric(e1, e2).approx() == doctest::Approx(5.0));
  CHECK_FALSE(euc.metric(e1, e2).is_exact());
}

TEST_CASE("metric and field compatibility") {
  CHECK(error_of([] { ValueSpace(FieldSpec::gf2(), 1, Metric::SupAbs); }) == ErrorCode::Validation);
  CHECK(error_of([] { ValueSpace(FieldSpec::rational(), 1, Metric::Euclidean); }) == ErrorCode::Validation);
  CHECK(parse_metric("hamming") == Metric::Hamming);
  CHECK(error_of([] { parse_metric("taxicab"); }) == ErrorCode::Config);
  ValueSpace g5(FieldSpec::gfp(5), 2, Metric::Discrete);
  CHECK(error_of([&] { g5.make({FieldSpec::gfp(5).one()}); }) == ErrorCode::InvalidArgument);
  CHECK(error_of([&] { g5.make({FieldSpec::gfp(7).one(), FieldSpec::gfp(7).one()}); }) == ErrorCode::FieldMismatch);
}

TEST_CASE("space arithmetic") {
  FieldSpec g5 = FieldSpec::gfp(5);
  ValueSpace e(g5, 2, Metric::Hamming);
  Vector a = e.make({g5.from_int(3), g5.from_int(1)});
  Vector b = e.make({g5.from_int(4), g5.from_int(4)});
  CHECK(e.equal(e.add(a, b), e.make({g5.from_int(2), g5.zero()})));
  CHECK(e.is_zero(e.sub(a, a)));
  CHECK(e.equal(e.scale(g5.from_int(2), a), e.make({g5.one(), g5.from_int(2)})));
  CHECK(e.size() == 25u);
  CHECK_FALSE(ValueSpace(FieldSpec::rational(), 1, Metric::Discrete).size());
}

TEST_CASE("metric axioms on random vectors") {
  testing::Rng rng(21);
  for (const ValueSpace& e : {ValueSpace(FieldSpec::gfp(3), 3, Metric::Hamming), ValueSpace(FieldSpec::rational(), 2, Metric::SupAbs),
                              ValueSpace(FieldSpec::gf2(), 2, Metric::Discrete)}) {
    for (int i = 0; i < 200; ++i) {
      Vector a = testing::random_vector(rng, e), b = testing::random_vector(rng, e), c = testing::random_vector(rng, e);
      CHECK(e.metric(a, b) == e.metric(b, a));
      CHECK((e.metric(a, b) == Real(0)) == e.equal(a, b));
      CHECK(e.metric(a, c) <= e.metric(a, b) + e.metric(b, c));
      CHECK(e.bounded_metric(a, c) <= e.bounded_metric(a, b) + e.bounded_metric(b, c));
      // translation invariance
      CHECK(e.metric(e.add(a, c), e.add(b, c)) == e.metric(a, b));
    }
  }
}

TEST_CASE("max-block decoding matches a brute-force listing") {
  for (std::uint64_t b = 0; b <= 3; ++b)
    for (std::size_t len = 1; len <= 3; ++len) {
      std::vector<std::vector<std::uint64_t>> want;
      std::vector<std::uint64_t> t(len, 0);
      for (;;) {
        bool uses = false;
        for (auto v : t) uses = uses || v == b;
        if (uses) want.push_back(t);
        std::size_t p = len;
        while (p > 0 && t[p - 1] == b) t[--p] = 0;
        if (p == 0) break;
        ++t[p - 1];
      }
      CHECK(max_block_size(b, len) == Integer(static_cast<unsigned long>(want.size())));
      for (std::size_t i = 0; i < want.size(); ++i) CHECK(decode_max_block(Integer(static_cast<unsigned long>(i)), b, len) == want[i]);
    }
}

TEST_CASE("dense enumeration") {
  FieldSpec g3 = FieldSpec::gfp(3);
  ValueSpace e(g3, 2, Metric::Hamming);
  std::set<std::string> seen;
  for (std::uint64_t i = 0; i < 9; ++i) CHECK(seen.insert(e.to_string(e.enumerate_dense(i))).second);
  CHECK(e.to_string(e.enumerate_dense(0)) == "(0,0)");
  CHECK(e.to_string(e.enumerate_dense(1)) == "(0,1)");
  CHECK(e.to_string(e.enumerate_dense(2)) == "(1,0)");
  CHECK(e.to_string(e.enumerate_dense(3)) == "(1,1)");
  CHECK(e.equal(e.enumerate_dense(9), e.enumerate_dense(0)));

  FieldSpec q = FieldSpec::rational();
  ValueSpace r(q, 1, Metric::SupAbs);
  for (std::uint64_t i = 0; i < 30; ++i) CHECK(r.enumerate_dense(i).coords[0].rational() == enumerate_rational(i));
}

TEST_CASE("listed metric and enumeration examples") {
  FieldSpec g2 = FieldSpec::gf2(), q = FieldSpec::rational();
  ValueSpace d(g2, 2, Metric::Discrete);
  Vector a = d.make({g2.one(), g2.zero()});
  CHECK(d.metric(a, a) == Real(0));
  CHECK(d.metric(a, d.zero()) == Real(1));
  ValueSpace s(q, 2, Metric::SupAbs);
  CHECK(s.metric(s.make({q.parse("1/2"), q.zero()}), s.make({q.zero(), q.parse("1/3")})) == Real(Rational(1, 2)));
  ValueSpace s1(q, 1, Metric::SupAbs);
  CHECK(s1.bounded_metric(s1.make({q.from_int(3)}), s1.zero()) == Real(Rational(3, 4)));

  ValueSpace b(g2, 1, Metric::Discrete);
  CHECK(b.enumerate_dense(0).coords[0].residue() == 0);
  CHECK(b.enumerate_dense(1).coords[0].residue() == 1);
  CHECK(b.enumerate_dense(2).coords[0].residue() == 0);
  ValueSpace z(g2, 0, Metric::Discrete);
  for (std::uint64_t i = 0; i < 5; ++i) CHECK(z.is_zero(z.enumerate_dense(i)));
}

TEST_CASE("nonzero scalars and the metric") {
  FieldSpec g5 = FieldSpec::gfp(5), q = FieldSpec::rational();
  ValueSpace d(g5, 2, Metric::Discrete);
  ValueSpace s(q, 2, Metric::SupAbs);
  testing::Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    Vector u = testing::random_vector(rng, d), v = testing::random_vector(rng, d);
    FieldElement a = testing::random_nonzero(rng, g5);
    CHECK(d.metric(d.scale(a, u), d.scale(a, v)) == d.metric(u, v));
    Vector x = testing::random_vector(rng, s), y = testing::random_vector(rng, s);
    FieldElement c = testing::random_nonzero(rng, q);
    Rational abs_c = abs(c.rational());
    CHECK(s.metric(s.scale(c, x), s.scale(c, y)) == Real(abs_c) * s.metric(x, y));
  }
}

TEST_CASE("translation invariance exhaustively on GF(2)^3") {
  FieldSpec g2 = FieldSpec::gf2();
  for (Metric m : {Metric::Discrete, Metric::Hamming}) {
    ValueSpace e(g2, 3, m);
    for (std::uint64_t i = 0; i < 8; ++i)
      for (std::uint64_t j = 0; j < 8; ++j)
        for (std::uint64_t k = 0; k < 8; ++k) {
          Vector u = e.enumerate_dense(i), v = e.enumerate_dense(j), z = e.enumerate_dense(k);
          CHECK(e.metric(e.add(u, z), e.add(v, z)) == e.metric(u, v));
        }
  }
}

TEST_CASE("scalar action is continuous on Q^2 and R^2") {
  // d(a v, b v) = |a - b| * |v| for the sup and Euclidean norms, so it tends
  // to 0 as b -> a; and d(a u, a v) = |a| d(u, v).
  FieldSpec q = FieldSpec::rational();
  ValueSpace sup(q, 2, Metric::SupAbs);
  Vector v = sup.make({q.from_rational(Rational(3, 2)), q.from_rational(Rational(-5, 7))});
  Vector u = sup.make({q.from_rational(Rational(1, 3)), q.from_int(2)});
  FieldElement a = q.from_rational(Rational(2, 5));
  for (unsigned k = 1; k <= 40; ++k) {
    Rational step(1, 1);
    step /= Rational(mpz_class(1) << k);
    FieldElement b = q.from_rational(Rational(2, 5) + step);
    CHECK(sup.metric(sup.scale(a, v), sup.scale(b, v)) == Real(step * Rational(3, 2)));
  }
  CHECK(sup.metric(sup.scale(a, u), sup.scale(a, v)) == Real(Rational(2, 5) * sup.metric(u, v).exact()));

  FieldSpec r = FieldSpec::approx_real(1e-12);
  ValueSpace euc(r, 2, Metric::Euclidean);
  Vector w = euc.make({r.from_int(3), r.from_int(4)});
  double prev = 1e300;
  for (int k = 1; k <= 30; ++k) {
    double eps = std::ldexp(1.0, -k);
    double d = euc.metric(euc.scale(r.from_int(1), w), euc.scale(r.from_rational(Rational(1) + Rational(1, 1ul << k)), w)).approx();
    CHECK(d == doctest::Approx(5 * eps).epsilon(1e-9));
    CHECK(d < prev);
    prev = d;
  }
}
