// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// Builders for universal harmonic functions and for spanning families whose
// nonzero linear combinations stay universal. Everything is finite depth:
// a build produces a function on levels 0..D together with a certificate of
// exact distances at the levels where targets were hit.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/harmonic.hpp"

namespace htlab {

// One hit: F extended from `front` to `level` so that omega_level(F)
// equals the refined target off the free slots.
struct StageHit {
  TreeFunction F;
  FreeSlots slots;
  Rational slot_mass;
};

StageHit hit_target(const WeightedTree& t, const ValueSpace& space, const TreeFunction& F, std::size_t level, const StepFunction& target);

// Smallest admissible level > front, >= min_level, whose greedy slot mass
// is below `tolerance`. Levels come from `allowed` (sorted) when given.
std::optional<std::size_t> next_stage_level(const WeightedTree& t, std::size_t front, std::size_t min_level, const Rational& tolerance,
                                            const std::vector<std::size_t>* allowed);

// Extends F to the tree's full depth: zero targets up to the stored depth,
// then a constant tail when the remaining levels are virtual.
TreeFunction fill_to_depth(const WeightedTree& t, const ValueSpace& space, const TreeFunction& F);

// dP(omega_n(f), h) < 1/s, strictly.
bool in_E_set(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, std::size_t n, const StepFunction& h, const Integer& s);

struct CertificateEntry {
  std::size_t j = 0;             // 1-based stage number
  std::string target;            // description, e.g. "dense:3"
  std::size_t level = 0;         // k_j
  std::size_t front = 0;         // level the stage started from
  Real achieved;                 // dP(omega_{k_j}(F), h_j)
  Rational bound;                // 1/j
  Rational slot_mass;            // P of the union of free sectors
};

struct UniversalResult {
  TreeFunction F;
  std::vector<CertificateEntry> certificate;
  std::vector<StepFunction> targets;  // h_1..h_J
  bool complete = false;
  std::string message;  // set when the depth ran out
};

struct UniversalOptions {
  std::size_t J = 1;
  std::vector<std::size_t> tau;          // empty means every level
  std::vector<StepFunction> targets;     // empty means dense_target(j - 1)
  std::vector<std::string> target_names;
};

UniversalResult build_universal(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, const UniversalOptions& opt);

// Recomputes every entry from F; returns the mismatching or failing ones.
std::vector<std::string> verify_certificate(const WeightedTree& t, const ValueSpace& space, const UniversalResult& r);

struct FamilyStage {
  bool zero = false;  // zero-target stage (its level joins the next tau)
  std::string target;
  std::size_t level = 0;
  Real achieved;
  Rational slot_mass;
};

struct FamilyMember {
  TreeFunction f;
  TreeFunction stub;  // h_k, a harmonic function on the whole tree
  std::size_t agree_depth = 0;  // f = h_k on levels 0..agree_depth
  Real rho;                     // rho(f_k, h_k)
  std::vector<StepFunction> own_targets;
  std::vector<std::string> own_target_names;
  std::vector<FamilyStage> stages;
};

struct SpanningFamily {
  std::vector<FamilyMember> members;
  // tau[0]: levels available to f_1; tau[k]: zero-hit levels of f_k.
  std::vector<std::vector<std::size_t>> tau;
  Rational stage_tolerance;
};

struct SpanningOptions {
  std::size_t m = 1;
  Rational stage_tolerance{1, 8};
  // Targets of f_m (usually a_m^{-1} h for the combinations to verify).
  std::vector<StepFunction> last_targets;
  std::vector<std::string> last_target_names;
  // Own targets of f_1..f_{m-1} are dense_target(0..own_count-1).
  std::size_t own_count = 3;
};

// Throws Error(DepthExhausted) when a member cannot place its targets.
SpanningFamily build_spanning_family(const WeightedTree& t, const ValueSpace& space, const SpanningOptions& opt);

struct SpanWitness {
  bool found = false;
  std::size_t level = 0;
  Real distance;
};

// L = sum a_k f_k; first n in tau_{m-1} with dP(omega_n(L), h) < eps.
SpanWitness verify_span(const WeightedTree& t, const ValueSpace& space, const SpanningFamily& family, const std::vector<FieldElement>& coeffs,
                        const StepFunction& h, const Rational& eps);

// omega_n(sum a_k f_k) == sum a_k omega_n(f_k) at every level; returns the
// levels where it fails.
std::vector<std::size_t> check_linearity(const WeightedTree& t, const ValueSpace& space, const SpanningFamily& family,
                                         const std::vector<FieldElement>& coeffs);

}  // namespace htlab
