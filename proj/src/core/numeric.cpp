// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/numeric.hpp"

#include <cctype>
#include <cstdio>

#include "core/error.hpp"

namespace htlab {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer parse_integer(std::string_view s, std::string_view whole) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) fail(ErrorCode::Config, "malformed number '" + std::string(whole) + "'");
  Integer z(std::string(s), 10);
  return neg ? Integer(-z) : z;
}

Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool neg = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    Integer ez = parse_integer(s.substr(e + 1), whole);
    if (!ez.fits_slong_p() || abs(ez) > 4096) fail(ErrorCode::Config, "exponent out of range in '" + std::string(whole) + "'");
    exponent = ez.get_si();
    s = s.substr(0, e);
  }
  std::string digits;
  long frac_len = 0;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto int_part = s.substr(0, dot);
    auto frac_part = s.substr(dot + 1);
    if ((!int_part.empty() && !all_digits(int_part)) || (!frac_part.empty() && !all_digits(frac_part)) ||
        (int_part.empty() && frac_part.empty()))
      fail(ErrorCode::Config, "malformed number '" + std::string(whole) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    frac_len = static_cast<long>(frac_part.size());
  } else {
    if (!all_digits(s)) fail(ErrorCode::Config, "malformed number '" + std::string(whole) + "'");
    digits = std::string(s);
  }
  Rational q{Integer(digits, 10)};
  long shift = exponent - frac_len;
  Integer ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  if (shift < 0)
    q /= Rational(ten_pow);
  else
    q *= Rational(ten_pow);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) fail(ErrorCode::Config, "empty number");
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den == 0) fail(ErrorCode::Config, "zero denominator in '" + std::string(text) + "'");
    Rational q(num, den);
    q.canonicalize();
    return q;
  }
  if (s.find_first_of(".eE") != std::string_view::npos) return parse_decimal(s, text);
  return Rational(parse_integer(s, text));
}

std::string to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_str();
}

Rational pow2_neg(unsigned n) {
  Integer den;
  mpz_ui_pow_ui(den.get_mpz_t(), 2, n);
  return Rational(Integer(1), den);
}

const Rational& Real::exact() const {
  if (!is_exact()) fail(ErrorCode::InvalidArgument, "approximate quantity has no exact value");
  return std::get<Rational>(value_);
}

double Real::approx() const {
  if (is_exact()) return std::get<Rational>(value_).get_d();
  return std::get<double>(value_);
}

Real operator+(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() + b.exact()));
  return Real(a.approx() + b.approx());
}

Real operator-(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() - b.exact()));
  return Real(a.approx() - b.approx());
}

Real operator*(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return Real(Rational(a.exact() * b.exact()));
  return Real(a.approx() * b.approx());
}

Real operator/(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) {
    if (b.exact() == 0) fail(ErrorCode::InvalidArgument, "division by zero");
    return Real(Rational(a.exact() / b.exact()));
  }
  return Real(a.approx() / b.approx());
}

bool operator==(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return a.exact() == b.exact();
  return a.approx() == b.approx();
}

bool operator<(const Real& a, const Real& b) {
  if (a.is_exact() && b.is_exact()) return a.exact() < b.exact();
  return a.approx() < b.approx();
}

std::string Real::to_string() const {
  if (is_exact()) return htlab::to_string(exact());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", approx());
  return buf;
}

}  // namespace htlab
