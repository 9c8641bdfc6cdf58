// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Runtime-selected scalar fields: GF(2), GF(p), Q and a tolerance-aware
// approximation of R. Edge weights, function values and linear-combination
// coefficients all live here.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "core/numeric.hpp"

namespace htlab {

enum class FieldKind : std::uint8_t { GF2, GFp, Rational, ApproxReal };

class FieldElement;

class FieldSpec {
 public:
  static FieldSpec gf2();
  static FieldSpec gfp(std::uint64_t p);  // throws Error(Validation) unless p is prime
  static FieldSpec rational();
  static FieldSpec approx_real(double eps);

  FieldSpec() = default;  // the rational field

  FieldKind kind() const { return kind_; }
  bool is_prime_field() const { return kind_ == FieldKind::GF2 || kind_ == FieldKind::GFp; }
  bool is_exact() const { return kind_ != FieldKind::ApproxReal; }
  std::uint64_t modulus() const { return modulus_; }  // 0 for Q and R
  double tolerance() const { return eps_; }
  // Number of elements for finite fields.
  std::optional<std::uint64_t> order() const;

  FieldElement zero() const;
  FieldElement one() const;
  FieldElement from_int(std::int64_t v) const;
  FieldElement from_rational(const Rational& q) const;  // GF(p): num * den^{-1}
  FieldElement parse(std::string_view text) const;

  // i-th element of the field's fixed enumeration. Finite fields list the
  // residues 0..p-1 and then wrap; Q (and its R image) is listed by height
  // max(|num|, den), positives ascending within a height, each followed by
  // its negative: 0, 1, -1, 1/2, -1/2, 2, -2, 1/3, -1/3, 2/3, ...
  FieldElement element(std::uint64_t i) const;

  std::string name() const;

  // gf2 and gfp(2) denote the same field.
  friend bool operator==(const FieldSpec& a, const FieldSpec& b);

 private:
  FieldKind kind_ = FieldKind::Rational;
  std::uint64_t modulus_ = 0;
  double eps_ = 0.0;
};

bool is_prime(std::uint64_t n);

// The i-th rational of the height enumeration described above.
Rational enumerate_rational(std::uint64_t i);

class FieldElement {
 public:
  FieldElement() = default;  // rational zero

  const FieldSpec& field() const { return spec_; }

  bool is_zero() const;
  std::uint64_t residue() const;        // prime fields only
  const Rational& rational() const;     // rational field only
  double real() const;                  // approx_real value, or a conversion

  FieldElement operator+(const FieldElement& b) const;
  FieldElement operator-(const FieldElement& b) const;
  FieldElement operator*(const FieldElement& b) const;
  FieldElement operator/(const FieldElement& b) const;
  FieldElement operator-() const;
  FieldElement inv() const;  // throws Error(ZeroInverse)

  // Exact for exact fields, |a - b| <= eps for approx_real. Elements of
  // different fields compare unequal.
  bool operator==(const FieldElement& b) const;
  bool operator!=(const FieldElement& b) const { return !(*this == b); }

  // Canonical ordering for exact fields (residue / rational value), used
  // only for interning.
  bool less(const FieldElement& b) const;

  std::string to_string() const;

 private:
  friend class FieldSpec;
  FieldElement(FieldSpec spec, std::uint64_t residue) : spec_(spec), value_(residue) {}
  FieldElement(FieldSpec spec, Rational q) : spec_(spec), value_(std::move(q)) {}
  FieldElement(FieldSpec spec, double x) : spec_(spec), value_(x) {}

  void require_same(const FieldElement& b, const char* op) const;

  FieldSpec spec_;
  std::variant<std::uint64_t, Rational, double> value_ = Rational(0);
};

FieldElement add(const FieldElement& a, const FieldElement& b);
FieldElement mul(const FieldElement& a, const FieldElement& b);
FieldElement inv(const FieldElement& a);

}  // namespace htlab
