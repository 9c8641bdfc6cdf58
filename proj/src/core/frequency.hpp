// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// The l/r schedule (l(k) = 1 + 2-adic valuation of k, r_k = l(1)+...+l(k)),
// tail-window density proxies, and the builders driven by them: frequent
// universality (stage k hits the ball around h_{l(k)} of radius 2^{-l(k)}
// at level r_k), its variant on a subset of levels through the collapsed
// tree, and the hold-based builder whose projections stay in each basis
// ball for long runs of consecutive levels.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/constructors.hpp"

namespace htlab {

std::uint32_t ell(std::uint64_t k);   // throws for k = 0
std::uint64_t r_of(std::uint64_t k);  // direct partial sum; r_of(0) = 0
// |{k <= 2^n : l(k) = m}| by direct scan.
std::uint64_t count_ell(unsigned n, unsigned m);

struct Schedule {
  std::uint64_t horizon = 0;
  std::vector<std::uint32_t> ell;  // ell[k - 1]
  std::vector<std::uint64_t> r;    // r[k - 1]
};
Schedule make_schedule(std::uint64_t horizon);

// Values r_k with l(k) = m and r_k <= W, increasing.
std::vector<std::uint64_t> r_values_with_ell(const Schedule& s, std::uint32_t m, std::uint64_t W);

// |S n [0,N]| / (N+1) minimized (lower) and maximized (upper) over
// N in [ceil(W/2), W]. S must be sorted.
struct DensityReport {
  std::string set;
  std::uint64_t window = 0;
  std::uint64_t hits = 0;  // |S n [0,W]|
  Rational lower;
  std::uint64_t lower_at = 0;
  Rational upper;
  std::uint64_t upper_at = 0;
};
DensityReport density(const std::vector<std::uint64_t>& sorted_set, std::uint64_t W, std::string description = {});

// |S n [0,N]| for every N in [0, W].
std::vector<std::uint64_t> running_counts(const std::vector<std::uint64_t>& sorted_set, std::uint64_t W);

struct Lemma43Result {
  TreeFunction F;
  Real achieved;  // dP(omega_{s+n}(F), h)
  Rational slot_mass;
};

// Extends phi (depth s) to depth s+n with omega_{s+n} in B(h, 2^{-n}).
Lemma43Result extend_lemma43(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, std::size_t n, const StepFunction& h);

struct FrequentHit {
  std::uint64_t k = 0;
  std::size_t index = 0;  // r_k
  std::size_t level = 0;  // tree level of the hit (r_k, or n_{r_k} on a level subset)
  std::uint32_t ell = 0;
  std::string target;
  Real achieved;
  Rational bound;  // 2^{-l(k)}
  Rational slot_mass;
};

struct FrequentOptions {
  std::uint64_t horizon = 1;  // last stage k
  std::uint32_t M = 3;        // targets reported by the density scan
  std::vector<StepFunction> targets;  // h_1.. ; dense_target(m - 1) beyond the list
  std::vector<std::string> target_names;
};

struct FrequentResult {
  TreeFunction F;
  std::vector<FrequentHit> hits;
  std::vector<StepFunction> hit_targets;  // per hit, on the tree F lives on
  std::uint64_t first_stage = 1;          // k(N)
  std::size_t padded_to = 0;              // r_{k(N)-1}
  bool complete = false;
  std::string message;
  std::vector<std::size_t> tau;  // level subset (empty for the plain build)
};

FrequentResult build_frequent(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, const FrequentOptions& opt);

// Hits at levels n_{r_k} of tau = {0 = n_0 < n_1 < ...}; phi.depth() must be
// in tau. The build runs on collapse(t, tau) and is pulled back level pair
// by level pair with the extension solver.
FrequentResult build_frequent_tau(const WeightedTree& t, const ValueSpace& space, const std::vector<std::size_t>& tau, const TreeFunction& phi,
                                  const FrequentOptions& opt);

// Recomputes every hit on the result's tree; lists failures.
std::vector<std::string> verify_frequent(const WeightedTree& t, const ValueSpace& space, const FrequentResult& r);

// Expected hit indices for target m: {r_k : l(k) = m, first <= k <= last}.
std::vector<std::uint64_t> expected_hit_indices(std::uint64_t first, std::uint64_t last, std::uint32_t m);

struct XOptions {
  std::vector<Ball> balls;
  std::vector<std::string> names;
  Rational hold_ratio{4, 5};
};

struct XVisit {
  std::size_t ball = 0;
  std::size_t round = 0;
  std::size_t front = 0;
  std::size_t gap = 0;
  std::size_t hit_level = 0;
  Real achieved;
  std::size_t hold_end = 0;
  bool hold_verified = false;
};

struct XBallReport {
  std::vector<std::uint64_t> members;  // levels n <= D with omega_n(F) in the ball
  std::size_t window = 0;              // end of the ball's last hold
  DensityReport density;
};

struct XResult {
  TreeFunction F;
  std::vector<XVisit> visits;
  std::vector<XBallReport> balls;
  std::string message;
};

// Throws Error(Validation) when some weights do not sum to 1.
XResult build_X(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, const XOptions& opt);

}  // namespace htlab
