// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/constructors.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace htlab {

namespace {

StepFunction zero_step(const ValueSpace& space) { return constant_step(space.zero()); }

std::size_t ceil_log2(std::size_t k) {
  std::size_t b = 0;
  while ((std::size_t{1} << b) < k) ++b;
  return b;
}

TreeFunction checked_seed(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi) {
  check_function(t, space, phi);
  auto h = is_harmonic(t, space, phi);
  if (!h.ok) fail(ErrorCode::Validation, "seed function is not harmonic (first violation at " + h.violations.front() + ")");
  return materialize(t, phi, phi.depth());
}

}  // namespace

StageHit hit_target(const WeightedTree& t, const ValueSpace& space, const TreeFunction& F, std::size_t level, const StepFunction& target) {
  if (level <= F.depth()) fail(ErrorCode::InvalidArgument, "stage level must lie below the current front");
  if (target.level > level) fail(ErrorCode::InvalidArgument, "target is not measurable at the stage level");
  StageHit hit;
  hit.slots = greedy_slots(t, F.depth(), level);
  hit.slot_mass = slot_mass(t, hit.slots);
  hit.F = extend_lemma35(t, space, F, hit.slots, targets_off_slots(t, hit.slots, target));
  return hit;
}

std::optional<std::size_t> next_stage_level(const WeightedTree& t, std::size_t front, std::size_t min_level, const Rational& tolerance,
                                            const std::vector<std::size_t>* allowed) {
  std::size_t last = std::min(t.depth(), t.materialized_depth());
  for (std::size_t n = std::max(front + 1, min_level); n <= last; ++n) {
    if (allowed && !std::binary_search(allowed->begin(), allowed->end(), n)) continue;
    if (slot_mass(t, greedy_slots(t, front, n)) < tolerance) return n;
  }
  return std::nullopt;
}

TreeFunction fill_to_depth(const WeightedTree& t, const ValueSpace& space, const TreeFunction& F) {
  std::size_t front = F.depth(), D = t.depth();
  if (front >= D) return F;
  if (!assumption2_violation(t, front, D)) return extend_constant(t, space, F, D);
  if (D > t.materialized_depth())
    fail(ErrorCode::DepthExhausted, "cannot fill to depth " + std::to_string(D) + ": constant extension is unavailable and level " +
                                        std::to_string(t.materialized_depth() + 1) + " is not stored");
  return hit_target(t, space, F, D, zero_step(space)).F;
}

bool in_E_set(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, std::size_t n, const StepFunction& h, const Integer& s) {
  if (s <= 0) fail(ErrorCode::InvalidArgument, "s must be positive");
  return dP(t, space, omega(f, n), h) < Real(Rational(Integer(1), s));
}

UniversalResult build_universal(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, const UniversalOptions& opt) {
  UniversalResult r;
  TreeFunction F = checked_seed(t, space, phi);
  const std::vector<std::size_t>* allowed = opt.tau.empty() ? nullptr : &opt.tau;
  std::size_t front = F.depth();
  for (std::size_t j = 1; j <= opt.J; ++j) {
    StepFunction h;
    std::string name;
    if (j <= opt.targets.size()) {
      h = opt.targets[j - 1];
      name = j <= opt.target_names.size() ? opt.target_names[j - 1] : "target:" + std::to_string(j);
    } else {
      try {
        h = dense_target(t, space, j - 1);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DepthExhausted) throw;
        r.message = std::string(e.what()) + "; at most " + std::to_string(j - 1) + " targets fit";
        break;
      }
      name = "dense:" + std::to_string(j - 1);
    }
    check_step(t, space, h);
    Rational bound(1, static_cast<unsigned long>(j));
    auto n = next_stage_level(t, front, h.level, bound, allowed);
    if (!n) {
      r.message = "depth " + std::to_string(t.depth()) + " exhausted before target " + std::to_string(j) + "; the largest achievable J is " +
                  std::to_string(j - 1);
      break;
    }
    StageHit hit = hit_target(t, space, F, *n, h);
    F = std::move(hit.F);
    CertificateEntry e;
    e.j = j;
    e.target = name;
    e.level = *n;
    e.front = front;
    e.achieved = dP(t, space, omega(F, *n), h);
    e.bound = bound;
    e.slot_mass = hit.slot_mass;
    r.certificate.push_back(std::move(e));
    r.targets.push_back(std::move(h));
    front = *n;
  }
  r.complete = r.certificate.size() == opt.J;
  r.F = fill_to_depth(t, space, F);
  return r;
}

std::vector<std::string> verify_certificate(const WeightedTree& t, const ValueSpace& space, const UniversalResult& r) {
  std::vector<std::string> bad;
  std::size_t prev = 0;
  for (std::size_t i = 0; i < r.certificate.size(); ++i) {
    const auto& e = r.certificate[i];
    Real again = dP(t, space, omega(r.F, e.level), r.targets[i]);
    if (!(again == e.achieved)) bad.push_back("entry " + std::to_string(e.j) + ": recomputed " + again.to_string() + " != " + e.achieved.to_string());
    if (!(e.achieved < Real(e.bound))) bad.push_back("entry " + std::to_string(e.j) + ": " + e.achieved.to_string() + " is not below " + to_string(e.bound));
    if (i > 0 && e.level <= prev) bad.push_back("entry " + std::to_string(e.j) + ": hit levels are not strictly increasing");
    prev = e.level;
  }
  auto h = is_harmonic(t, space, r.F);
  if (!h.ok) bad.push_back("F is not harmonic (first violation at " + h.violations.front() + ")");
  if (r.F.depth() != t.depth()) bad.push_back("F stops at depth " + std::to_string(r.F.depth()));
  return bad;
}

SpanningFamily build_spanning_family(const WeightedTree& t, const ValueSpace& space, const SpanningOptions& opt) {
  if (opt.m == 0) fail(ErrorCode::InvalidArgument, "family size must be at least 1");
  SpanningFamily fam;
  fam.stage_tolerance = opt.stage_tolerance;
  const std::size_t D = std::min(t.depth(), t.materialized_depth());
  std::vector<std::size_t> all;
  for (std::size_t n = 1; n <= D; ++n) all.push_back(n);
  fam.tau.push_back(all);
  const StepFunction zero = zero_step(space);

  for (std::size_t k = 1; k <= opt.m; ++k) {
    FamilyMember mem;
    mem.stub = fill_to_depth(t, space, harmonic_from_level(t, space, dense_target(t, space, k - 1)));
    // Agreeing on the first c enumerated vertices keeps rho below 2^{1-c}.
    std::size_t need = 1 + ceil_log2(k), count = 0, L = 0;
    for (;; ++L) {
      count += t.level_size(L);
      if (count >= need) break;
    }
    mem.agree_depth = L;
    TreeFunction F = materialize(t, mem.stub, L);
    F.truncate(L);

    if (k == opt.m) {
      mem.own_targets = opt.last_targets;
      mem.own_target_names = opt.last_target_names;
    } else {
      for (std::size_t i = 0; i < opt.own_count; ++i) {
        mem.own_targets.push_back(dense_target(t, space, i));
        mem.own_target_names.push_back("dense:" + std::to_string(i));
      }
    }
    mem.own_target_names.resize(mem.own_targets.size());

    std::vector<std::size_t> allowed;
    for (auto n : fam.tau[k - 1])
      if (n > L) allowed.push_back(n);
    std::vector<std::size_t> zero_hits;
    auto stage = [&](const StepFunction& target, bool is_zero, const std::string& name) {
      auto n = next_stage_level(t, F.depth(), target.level, opt.stage_tolerance, &allowed);
      if (!n) return false;
      StageHit hit = hit_target(t, space, F, *n, target);
      F = std::move(hit.F);
      FamilyStage s;
      s.zero = is_zero;
      s.target = name;
      s.level = *n;
      s.achieved = dP(t, space, omega(F, *n), target);
      s.slot_mass = hit.slot_mass;
      mem.stages.push_back(std::move(s));
      if (is_zero) zero_hits.push_back(*n);
      return true;
    };
    for (std::size_t i = 0; i < mem.own_targets.size(); ++i) {
      if (!stage(mem.own_targets[i], false, mem.own_target_names[i]))
        fail(ErrorCode::DepthExhausted, "family member " + std::to_string(k) + ": no admissible level left for target " + mem.own_target_names[i]);
      if (!stage(zero, true, "zero"))
        fail(ErrorCode::DepthExhausted, "family member " + std::to_string(k) + ": no admissible level left for the zero stage after " +
                                            mem.own_target_names[i]);
    }
    while (stage(zero, true, "zero")) {
    }
    mem.f = fill_to_depth(t, space, F);
    mem.rho = rho(t, space, mem.f, mem.stub);
    fam.tau.push_back(std::move(zero_hits));
    fam.members.push_back(std::move(mem));
  }
  return fam;
}

SpanWitness verify_span(const WeightedTree& t, const ValueSpace& space, const SpanningFamily& family, const std::vector<FieldElement>& coeffs,
                        const StepFunction& h, const Rational& eps) {
  const std::size_t m = family.members.size();
  if (coeffs.size() != m) fail(ErrorCode::InvalidArgument, "expected " + std::to_string(m) + " coefficients");
  if (coeffs.back().is_zero()) fail(ErrorCode::InvalidArgument, "the last coefficient must be nonzero");
  std::vector<const TreeFunction*> fs;
  for (const auto& mem : family.members) fs.push_back(&mem.f);
  TreeFunction L = linear_combination(t, space, coeffs, fs);
  SpanWitness w;
  for (auto n : family.tau[m - 1]) {
    if (n < h.level) continue;
    Real d = dP(t, space, omega(L, n), h);
    if (d < Real(eps)) {
      w.found = true;
      w.level = n;
      w.distance = d;
      return w;
    }
  }
  return w;
}

std::vector<std::size_t> check_linearity(const WeightedTree& t, const ValueSpace& space, const SpanningFamily& family,
                                         const std::vector<FieldElement>& coeffs) {
  std::vector<const TreeFunction*> fs;
  for (const auto& mem : family.members) fs.push_back(&mem.f);
  TreeFunction L = linear_combination(t, space, coeffs, fs);
  std::vector<std::size_t> bad;
  std::size_t top = std::min(L.depth(), t.materialized_depth());
  for (std::size_t n = 0; n <= top; ++n) {
    StepFunction lhs = refine(t, omega(L, n), n);
    StepFunction rhs{n, std::vector<Vector>(lhs.values.size(), space.zero())};
    for (std::size_t k = 0; k < fs.size(); ++k) {
      StepFunction part = refine(t, omega(*fs[k], n), n);
      for (std::size_t i = 0; i < rhs.values.size(); ++i) rhs.values[i] = space.add(rhs.values[i], space.scale(coeffs[k], part.values[i]));
    }
    if (!same_boundary_function(t, space, lhs, rhs)) bad.push_back(n);
  }
  return bad;
}

}  // namespace htlab
