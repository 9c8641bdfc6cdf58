// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>
#include <variant>

namespace htlab {

using Rational = mpq_class;
using Integer = mpz_class;

// Parses "n", "-n", "n/d" or a decimal such as "0.45" or "-1.5e-2" into a
// reduced fraction. Throws Error(Config) on malformed input or zero
// denominator.
Rational parse_rational(std::string_view text);

// "n" when the denominator is 1, "n/d" otherwise.
std::string to_string(const Rational& q);

Rational pow2_neg(unsigned n);  // 2^{-n}

/// A nonnegative quantity such as a distance or a probability mass.
///
/// Exact metrics produce rationals; the euclidean metric produces doubles.
/// Arithmetic stays exact while both operands are exact and degrades to
/// double as soon as one side is approximate.
class Real {
 public:
  Real() : value_(Rational(0)) {}
  Real(Rational q) : value_(std::move(q)) {}  // NOLINT(implicit)
  Real(double x) : value_(x) {}               // NOLINT(implicit)
  Real(int x) : value_(Rational(x)) {}        // NOLINT(implicit)

  bool is_exact() const { return std::holds_alternative<Rational>(value_); }
  const Rational& exact() const;  // throws if approximate
  double approx() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  Real& operator+=(const Real& b) { return *this = *this + b; }

  friend bool operator==(const Real& a, const Real& b);
  friend bool operator<(const Real& a, const Real& b);
  friend bool operator<=(const Real& a, const Real& b) { return !(b < a); }
  friend bool operator>(const Real& a, const Real& b) { return b < a; }
  friend bool operator>=(const Real& a, const Real& b) { return !(a < b); }

  // Exact values render as fractions, approximate ones with %.17g.
  std::string to_string() const;

 private:
  std::variant<Rational, double> value_;
};

}  // namespace htlab
