// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/value_space.hpp"

#include <cmath>

#include "core/error.hpp"

namespace htlab {

const char* to_string(Metric m) {
  switch (m) {
    case Metric::Discrete:
      return "discrete";
    case Metric::Hamming:
      return "hamming";
    case Metric::SupAbs:
      return "sup_abs";
    case Metric::Euclidean:
      return "euclidean";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "discrete") return Metric::Discrete;
  if (name == "hamming" || name == "normalized_hamming") return Metric::Hamming;
  if (name == "sup_abs") return Metric::SupAbs;
  if (name == "euclidean") return Metric::Euclidean;
  fail(ErrorCode::Config, "unknown metric '" + std::string(name) + "'");
}

ValueSpace::ValueSpace(FieldSpec field, std::size_t dim, Metric metric) : field_(field), dim_(dim), metric_(metric) {
  if (metric == Metric::SupAbs && field.kind() != FieldKind::Rational)
    fail(ErrorCode::Validation, "sup_abs metric needs the rational field, got " + field.name());
  if (metric == Metric::Euclidean && field.kind() != FieldKind::ApproxReal)
    fail(ErrorCode::Validation, "euclidean metric needs approx_real coordinates, got " + field.name());
}

std::optional<std::uint64_t> ValueSpace::size() const {
  auto p = field_.order();
  if (!p) return std::nullopt;
  std::uint64_t s = 1;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (s > (std::uint64_t{1} << 62) / *p) return std::nullopt;
    s *= *p;
  }
  return s;
}

Vector ValueSpace::zero() const { return Vector{std::vector<FieldElement>(dim_, field_.zero())}; }

Vector ValueSpace::unit() const {
  if (dim_ == 0) fail(ErrorCode::InvalidArgument, "the trivial space has no nonzero vector");
  Vector v = zero();
  v.coords[0] = field_.one();
  return v;
}

Vector ValueSpace::make(std::vector<FieldElement> coords) const {
  Vector v{std::move(coords)};
  check(v);
  return v;
}

void ValueSpace::check(const Vector& v) const {
  if (v.coords.size() != dim_)
    fail(ErrorCode::InvalidArgument, "vector of length " + std::to_string(v.coords.size()) + " in a space of dimension " + std::to_string(dim_));
  for (const auto& c : v.coords)
    if (!(c.field() == field_)) fail(ErrorCode::FieldMismatch, "coordinate from " + c.field().name() + " in a space over " + field_.name());
}

Vector ValueSpace::add(const Vector& a, const Vector& b) const {
  Vector r = a;
  for (std::size_t i = 0; i < dim_; ++i) r.coords[i] = a.coords[i] + b.coords[i];
  return r;
}

Vector ValueSpace::sub(const Vector& a, const Vector& b) const {
  Vector r = a;
  for (std::size_t i = 0; i < dim_; ++i) r.coords[i] = a.coords[i] - b.coords[i];
  return r;
}

Vector ValueSpace::scale(const FieldElement& a, const Vector& v) const {
  Vector r = v;
  for (auto& c : r.coords) c = a * c;
  return r;
}

bool ValueSpace::equal(const Vector& a, const Vector& b) const {
  for (std::size_t i = 0; i < dim_; ++i)
    if (a.coords[i] != b.coords[i]) return false;
  return true;
}

bool ValueSpace::is_zero(const Vector& v) const {
  for (const auto& c : v.coords)
    if (!c.is_zero()) return false;
  return true;
}

Real ValueSpace::metric(const Vector& a, const Vector& b) const {
  if (a.coords.size() != dim_ || b.coords.size() != dim_) fail(ErrorCode::InvalidArgument, "metric: vector length does not match the space");
  if (dim_ == 0) return Real(0);
  switch (metric_) {
    case Metric::Discrete:
      return Real(equal(a, b) ? 0 : 1);
    case Metric::Hamming: {
      long diff = 0;
      for (std::size_t i = 0; i < dim_; ++i)
        if (a.coords[i] != b.coords[i]) ++diff;
      Rational d(diff, static_cast<unsigned long>(dim_));
      d.canonicalize();
      return Real(d);
    }
    case Metric::SupAbs: {
      Rational m(0);
      for (std::size_t i = 0; i < dim_; ++i) {
        Rational d = abs(a.coords[i].rational() - b.coords[i].rational());
        if (d > m) m = d;
      }
      return Real(m);
    }
    case Metric::Euclidean: {
      double s = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        double d = a.coords[i].real() - b.coords[i].real();
        s += d * d;
      }
      return Real(std::sqrt(s));
    }
  }
  return Real(0);
}

Real ValueSpace::bounded_metric(const Vector& a, const Vector& b) const {
  Real d = metric(a, b);
  return d / (Real(1) + d);
}

Real ValueSpace::bounded_metric_sup() const {
  if (dim_ == 0) return Real(0);
  if (metric_ == Metric::Discrete || metric_ == Metric::Hamming) return Real(Rational(1, 2));
  return Real(1);
}

Integer max_block_size(std::uint64_t b, std::size_t len) {
  Integer hi, lo;
  mpz_ui_pow_ui(hi.get_mpz_t(), b + 1, len);
  mpz_ui_pow_ui(lo.get_mpz_t(), b, len);
  return hi - lo;
}

std::vector<std::uint64_t> decode_max_block(const Integer& offset, std::uint64_t b, std::size_t len) {
  if (offset < 0 || offset >= max_block_size(b, len)) fail(ErrorCode::InvalidArgument, "block offset out of range");
  // full[r] = (b+1)^r, with_b[r] = (b+1)^r - b^r.
  std::vector<Integer> full(len + 1), with_b(len + 1);
  Integer lo(1);
  full[0] = 1;
  with_b[0] = 0;
  for (std::size_t r = 1; r <= len; ++r) {
    full[r] = full[r - 1] * static_cast<unsigned long>(b + 1);
    lo *= static_cast<unsigned long>(b);
    with_b[r] = full[r] - lo;
  }
  std::vector<std::uint64_t> out(len);
  Integer rest = offset;
  bool has_b = false;
  for (std::size_t pos = 0; pos < len; ++pos) {
    std::size_t rem = len - pos - 1;
    if (has_b) {
      Integer d = rest / full[rem];
      rest -= d * full[rem];
      out[pos] = d.get_ui();
      continue;
    }
    // Digits below b leave the obligation to use b in the remainder.
    Integer below = with_b[rem] * static_cast<unsigned long>(b);
    if (rest < below) {
      Integer d = rest / with_b[rem];
      rest -= d * with_b[rem];
      out[pos] = d.get_ui();
    } else {
      rest -= below;
      out[pos] = b;
      has_b = true;
    }
  }
  return out;
}

Vector ValueSpace::enumerate_dense(std::uint64_t i) const {
  if (dim_ == 0) return zero();
  if (auto n = size()) i %= *n;
  if (i == 0) return zero();
  // Block b holds the tuples with maximum index b, at indices b^k .. (b+1)^k - 1.
  Integer target(static_cast<unsigned long>(i)), root, start;
  mpz_root(root.get_mpz_t(), target.get_mpz_t(), dim_);
  std::uint64_t b = root.get_ui();
  mpz_ui_pow_ui(start.get_mpz_t(), b, dim_);
  Vector v;
  v.coords.reserve(dim_);
  for (auto d : decode_max_block(target - start, b, dim_)) v.coords.push_back(field_.element(d));
  return v;
}

std::string ValueSpace::to_string(const Vector& v) const {
  if (v.coords.size() == 1) return v.coords[0].to_string();
  std::string s = "(";
  for (std::size_t i = 0; i < v.coords.size(); ++i) {
    if (i) s += ",";
    s += v.coords[i].to_string();
  }
  return s + ")";
}

}  // namespace htlab
