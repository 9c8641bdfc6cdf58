// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Concrete value spaces E = F^k with a translation invariant metric, and a
// fixed countable dense subset D_E.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/field.hpp"

namespace htlab {

enum class Metric : std::uint8_t { Discrete, Hamming, SupAbs, Euclidean };

const char* to_string(Metric m);
Metric parse_metric(std::string_view name);  // throws Error(Config)

struct Vector {
  std::vector<FieldElement> coords;
};

class ValueSpace {
 public:
  // sup_abs needs the rational field, euclidean needs approx_real.
  ValueSpace(FieldSpec field, std::size_t dim, Metric metric);
  ValueSpace() : ValueSpace(FieldSpec::gf2(), 1, Metric::Discrete) {}

  const FieldSpec& field() const { return field_; }
  std::size_t dim() const { return dim_; }
  Metric metric_kind() const { return metric_; }
  // |E| when finite and below 2^63.
  std::optional<std::uint64_t> size() const;
  bool trivial() const { return dim_ == 0; }

  Vector zero() const;
  Vector unit() const;  // (1, 0, ..., 0); requires dim >= 1
  Vector make(std::vector<FieldElement> coords) const;
  void check(const Vector& v) const;  // throws Error(FieldMismatch / InvalidArgument)

  Vector add(const Vector& a, const Vector& b) const;
  Vector sub(const Vector& a, const Vector& b) const;
  Vector scale(const FieldElement& a, const Vector& v) const;
  bool equal(const Vector& a, const Vector& b) const;
  bool is_zero(const Vector& v) const;

  Real metric(const Vector& a, const Vector& b) const;
  Real bounded_metric(const Vector& a, const Vector& b) const;  // d / (1 + d)
  // Supremum of bounded_metric over E, or 1 when unbounded.
  Real bounded_metric_sup() const;

  // i-th element of D_E. Tuples of base-field enumeration indices are
  // listed in blocks of equal maximum index, lexicographically inside a
  // block with coordinate 0 most significant. Finite E wraps after |E|.
  Vector enumerate_dense(std::uint64_t i) const;

  std::string to_string(const Vector& v) const;  // "a" for k = 1, "(a,b)" otherwise

  friend bool operator==(const ValueSpace& a, const ValueSpace& b) {
    return a.field_ == b.field_ && a.dim_ == b.dim_ && a.metric_ == b.metric_;
  }

 private:
  FieldSpec field_;
  std::size_t dim_;
  Metric metric_;
};

// The `offset`-th tuple (lexicographic, position 0 most significant) among
// tuples of length `len` over [0, b] that use b at least once.
std::vector<std::uint64_t> decode_max_block(const Integer& offset, std::uint64_t b, std::size_t len);

// Number of such tuples: (b+1)^len - b^len.
Integer max_block_size(std::uint64_t b, std::size_t len);

}  // namespace htlab
