// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// The six commands behind the command-line tool. Each returns its artifacts
// in memory; callers decide where to write them. Reports are deterministic:
// sorted keys, no timestamps, and the SHA-256 of the canonical config.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "core/error.hpp"
#include "report/config.hpp"

namespace htlab {

enum class Outcome : int { Ok = 0, VerificationFailed = 1, ConfigError = 2, DepthExhausted = 3 };

const char* to_string(Outcome o);

struct Artifact {
  std::string name;  // file name, e.g. "universal.json"
  std::string data;
};

struct CommandResult {
  Outcome status = Outcome::Ok;
  std::string summary;  // one line for the terminal
  std::vector<Artifact> artifacts;
};

const std::vector<std::string>& command_names();

// Unknown commands and configuration errors come back as ConfigError
// results, never as exceptions.
CommandResult run_command(const std::string& command, const RunConfig& config, std::optional<std::uint64_t> seed_override = std::nullopt);

// Lowercase hex SHA-256 of the canonical config text.
std::string config_hash(const RunConfig& config);

// Exit status for an exception escaping a builder.
Outcome outcome_for(ErrorCode code);

}  // namespace htlab
