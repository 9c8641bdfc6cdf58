// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// JSON run configuration. Every object is checked for unknown keys so that
// typos surface as configuration errors instead of silent defaults.
//
// Scalars (q, weights, radii, coefficients, vector coordinates) accept JSON
// numbers or strings such as "1/16"; numbers are read through their
// shortest decimal form, so 0.45 means 9/20 exactly.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/frequency.hpp"

namespace htlab {

// A boundary function as written in a config: either {"dense": j}, or
// {"level": n, "values": [...]}, or {"constant": v}.
struct StepSpec {
  std::optional<std::uint64_t> dense;
  std::optional<std::size_t> level;
  std::vector<nlohmann::json> values;
  std::optional<nlohmann::json> constant;
  std::string name() const;
};

struct UniversalConfig {
  std::size_t J = 1;
  std::vector<std::size_t> tau;
  std::vector<StepSpec> targets;
};

struct FrequentConfig {
  std::uint64_t horizon = 1;
  std::uint32_t M = 3;
  std::vector<std::size_t> tau;
  std::vector<StepSpec> targets;
};

struct GenericityConfig {
  std::size_t m = 2;
  std::vector<std::vector<nlohmann::json>> coeffs;
  std::vector<StepSpec> targets;
  Rational stage_tolerance{1, 8};
  Rational eps{1, 4};
  std::size_t own_count = 3;
};

struct BallSpec {
  StepSpec target;
  Rational radius;
};

struct XConfig {
  std::vector<BallSpec> balls;
  Rational hold_ratio{4, 5};
  std::optional<Rational> min_upper_density;
};

struct ScheduleConfig {
  std::uint64_t horizon = 1024;
  std::uint32_t M = 5;
  std::uint64_t window = 0;  // 0: r_horizon
  std::size_t series_points = 256;
};

struct MonteCarloConfig {
  std::uint64_t samples = 10000;
  std::size_t pairs = 3;
};

struct RunConfig {
  TreeConfig tree;
  std::size_t dim = 1;
  Metric metric = Metric::Discrete;
  std::uint64_t seed = 0;
  std::optional<StepSpec> phi;  // absent: the zero function on the root
  std::optional<nlohmann::json> phi_levels;  // {"depth": N, "levels": [[...], ...]}
  std::optional<UniversalConfig> universal;
  std::optional<FrequentConfig> frequent;
  std::optional<GenericityConfig> genericity;
  std::optional<XConfig> x;
  std::optional<ScheduleConfig> schedule;
  MonteCarloConfig monte_carlo;
  std::string canonical;  // compact sorted dump of the parsed document
};

// Throws Error(Config) on malformed JSON or bad values.
RunConfig parse_config(const std::string& text);

// Reads and parses a file; Error(Config) also covers I/O failures.
RunConfig load_config(const std::string& path);

// Resolves a scalar in the given field.
FieldElement parse_scalar(const FieldSpec& field, const nlohmann::json& v);
Vector parse_vector(const ValueSpace& space, const nlohmann::json& v);

StepFunction resolve_step(const WeightedTree& t, const ValueSpace& space, const StepSpec& s);

// The seed function: explicit levels, harmonic_from_level of the
// configured step, or the zero function on the root.
TreeFunction resolve_phi(const WeightedTree& t, const ValueSpace& space, const RunConfig& c);

}  // namespace htlab
