// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/field.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <vector>

#include "core/error.hpp"

namespace htlab {

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2)
    if (n % d == 0) return false;
  return true;
}

FieldSpec FieldSpec::gf2() {
  FieldSpec s;
  s.kind_ = FieldKind::GF2;
  s.modulus_ = 2;
  return s;
}

FieldSpec FieldSpec::gfp(std::uint64_t p) {
  // Residue products must fit in 64 bits.
  if (p >= (std::uint64_t{1} << 32)) fail(ErrorCode::Validation, "GF(p) modulus " + std::to_string(p) + " too large (limit 2^32)");
  if (!is_prime(p)) fail(ErrorCode::Validation, "GF(p) modulus " + std::to_string(p) + " is not prime");
  if (p == 2) return gf2();
  FieldSpec s;
  s.kind_ = FieldKind::GFp;
  s.modulus_ = p;
  return s;
}

FieldSpec FieldSpec::rational() { return FieldSpec{}; }

FieldSpec FieldSpec::approx_real(double eps) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) fail(ErrorCode::Validation, "approx_real tolerance must be a finite nonnegative number");
  FieldSpec s;
  s.kind_ = FieldKind::ApproxReal;
  s.eps_ = eps;
  return s;
}

bool operator==(const FieldSpec& a, const FieldSpec& b) {
  if (a.is_prime_field() || b.is_prime_field()) return a.is_prime_field() && b.is_prime_field() && a.modulus_ == b.modulus_;
  return a.kind_ == b.kind_ && a.eps_ == b.eps_;
}

std::optional<std::uint64_t> FieldSpec::order() const {
  if (is_prime_field()) return modulus_;
  return std::nullopt;
}

FieldElement FieldSpec::zero() const { return from_int(0); }
FieldElement FieldSpec::one() const { return from_int(1); }

FieldElement FieldSpec::from_int(std::int64_t v) const {
  switch (kind_) {
    case FieldKind::GF2:
    case FieldKind::GFp: {
      auto p = static_cast<std::int64_t>(modulus_);
      std::int64_t r = v % p;
      if (r < 0) r += p;
      return FieldElement(*this, static_cast<std::uint64_t>(r));
    }
    case FieldKind::Rational:
      return FieldElement(*this, Rational(static_cast<long>(v)));
    case FieldKind::ApproxReal:
      return FieldElement(*this, static_cast<double>(v));
  }
  return FieldElement();
}

FieldElement FieldSpec::from_rational(const Rational& q) const {
  switch (kind_) {
    case FieldKind::GF2:
    case FieldKind::GFp: {
      Integer p(static_cast<unsigned long>(modulus_));
      Integer num = q.get_num() % p;
      if (num < 0) num += p;
      Integer den = q.get_den() % p;
      if (den == 0) fail(ErrorCode::ZeroInverse, "denominator of " + htlab::to_string(q) + " vanishes in " + name());
      FieldElement n(*this, static_cast<std::uint64_t>(num.get_ui()));
      FieldElement d(*this, static_cast<std::uint64_t>(den.get_ui()));
      return n * d.inv();
    }
    case FieldKind::Rational: {
      Rational c(q);
      c.canonicalize();
      return FieldElement(*this, std::move(c));
    }
    case FieldKind::ApproxReal: {
      Rational c(q);
      c.canonicalize();
      return FieldElement(*this, c.get_d());
    }
  }
  return FieldElement();
}

FieldElement FieldSpec::parse(std::string_view text) const { return from_rational(parse_rational(text)); }

Rational enumerate_rational(std::uint64_t i) {
  if (i == 0) return Rational(0);
  std::uint64_t idx = i - 1;
  std::vector<Rational> positives;
  for (unsigned long h = 1;; ++h) {
    positives.clear();
    for (unsigned long p = 1; p <= h; ++p)
      if (std::gcd(p, h) == 1) positives.emplace_back(p, h);
    for (unsigned long q = h - 1; q >= 1; --q)
      if (std::gcd(h, q) == 1) positives.emplace_back(h, q);
    std::uint64_t count = 2 * positives.size();
    if (idx < count) {
      Rational r = positives[idx / 2];
      r.canonicalize();
      return idx % 2 == 0 ? r : Rational(-r);
    }
    idx -= count;
  }
}

FieldElement FieldSpec::element(std::uint64_t i) const {
  if (is_prime_field()) return FieldElement(*this, i % modulus_);
  return from_rational(enumerate_rational(i));
}

std::string FieldSpec::name() const {
  switch (kind_) {
    case FieldKind::GF2:
      return "GF(2)";
    case FieldKind::GFp:
      return "GF(" + std::to_string(modulus_) + ")";
    case FieldKind::Rational:
      return "Q";
    case FieldKind::ApproxReal: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "R~%g", eps_);
      return buf;
    }
  }
  return "?";
}

void FieldElement::require_same(const FieldElement& b, const char* op) const {
  if (!(spec_ == b.spec_)) fail(ErrorCode::FieldMismatch, std::string(op) + ": operands from " + spec_.name() + " and " + b.spec_.name());
}

bool FieldElement::is_zero() const {
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return std::get<std::uint64_t>(value_) == 0;
    case FieldKind::Rational:
      return std::get<Rational>(value_) == 0;
    case FieldKind::ApproxReal:
      return std::fabs(std::get<double>(value_)) <= spec_.tolerance();
  }
  return false;
}

std::uint64_t FieldElement::residue() const {
  if (!spec_.is_prime_field()) fail(ErrorCode::InvalidArgument, "residue() on " + spec_.name());
  return std::get<std::uint64_t>(value_);
}

const Rational& FieldElement::rational() const {
  if (spec_.kind() != FieldKind::Rational) fail(ErrorCode::InvalidArgument, "rational() on " + spec_.name());
  return std::get<Rational>(value_);
}

double FieldElement::real() const {
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return static_cast<double>(std::get<std::uint64_t>(value_));
    case FieldKind::Rational:
      return std::get<Rational>(value_).get_d();
    case FieldKind::ApproxReal:
      return std::get<double>(value_);
  }
  return 0.0;
}

FieldElement FieldElement::operator+(const FieldElement& b) const {
  require_same(b, "add");
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return FieldElement(spec_, (residue() + b.residue()) % spec_.modulus());
    case FieldKind::Rational:
      return FieldElement(spec_, Rational(rational() + b.rational()));
    case FieldKind::ApproxReal:
      return FieldElement(spec_, real() + b.real());
  }
  return {};
}

FieldElement FieldElement::operator-() const {
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return FieldElement(spec_, (spec_.modulus() - residue()) % spec_.modulus());
    case FieldKind::Rational:
      return FieldElement(spec_, Rational(-rational()));
    case FieldKind::ApproxReal:
      return FieldElement(spec_, -real());
  }
  return {};
}

FieldElement FieldElement::operator-(const FieldElement& b) const {
  require_same(b, "sub");
  return *this + (-b);
}

FieldElement FieldElement::operator*(const FieldElement& b) const {
  require_same(b, "mul");
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return FieldElement(spec_, (residue() * b.residue()) % spec_.modulus());
    case FieldKind::Rational:
      return FieldElement(spec_, Rational(rational() * b.rational()));
    case FieldKind::ApproxReal:
      return FieldElement(spec_, real() * b.real());
  }
  return {};
}

FieldElement FieldElement::inv() const {
  if (is_zero()) fail(ErrorCode::ZeroInverse, "inverse of zero in " + spec_.name());
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp: {
      // Extended Euclid on (a, p).
      auto p = static_cast<std::int64_t>(spec_.modulus());
      std::int64_t r0 = p, r1 = static_cast<std::int64_t>(residue());
      std::int64_t t0 = 0, t1 = 1;
      while (r1 != 0) {
        std::int64_t q = r0 / r1;
        std::int64_t r2 = r0 - q * r1;
        r0 = r1;
        r1 = r2;
        std::int64_t t2 = t0 - q * t1;
        t0 = t1;
        t1 = t2;
      }
      if (t0 < 0) t0 += p;
      return FieldElement(spec_, static_cast<std::uint64_t>(t0));
    }
    case FieldKind::Rational:
      return FieldElement(spec_, Rational(1 / rational()));
    case FieldKind::ApproxReal:
      return FieldElement(spec_, 1.0 / real());
  }
  return {};
}

FieldElement FieldElement::operator/(const FieldElement& b) const {
  require_same(b, "div");
  return *this * b.inv();
}

bool FieldElement::operator==(const FieldElement& b) const {
  if (!(spec_ == b.spec_)) return false;
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return residue() == b.residue();
    case FieldKind::Rational:
      return rational() == b.rational();
    case FieldKind::ApproxReal:
      return std::fabs(real() - b.real()) <= spec_.tolerance();
  }
  return false;
}

bool FieldElement::less(const FieldElement& b) const {
  require_same(b, "compare");
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return residue() < b.residue();
    case FieldKind::Rational:
      return rational() < b.rational();
    case FieldKind::ApproxReal:
      return real() < b.real();
  }
  return false;
}

std::string FieldElement::to_string() const {
  switch (spec_.kind()) {
    case FieldKind::GF2:
    case FieldKind::GFp:
      return std::to_string(residue());
    case FieldKind::Rational:
      return htlab::to_string(rational());
    case FieldKind::ApproxReal: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", real());
      return buf;
    }
  }
  return "?";
}

FieldElement add(const FieldElement& a, const FieldElement& b) { return a + b; }
FieldElement mul(const FieldElement& a, const FieldElement& b) { return a * b; }
FieldElement inv(const FieldElement& a) { return a.inv(); }

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument:
      return "invalid argument";
    case ErrorCode::FieldMismatch:
      return "field mismatch";
    case ErrorCode::ZeroInverse:
      return "zero inverse";
    case ErrorCode::Validation:
      return "validation";
    case ErrorCode::Config:
      return "config";
    case ErrorCode::DepthExhausted:
      return "depth exhausted";
    case ErrorCode::ResourceLimit:
      return "resource limit";
  }
  return "unknown";
}

}  // namespace htlab
