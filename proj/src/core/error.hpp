// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace htlab {

// Broad failure classes. The C API and the CLI map these onto status and
// exit codes, so keep the set small and stable.
enum class ErrorCode {
  InvalidArgument,  // caller broke a precondition
  FieldMismatch,    // operands from different fields / value spaces
  ZeroInverse,      // inverse of zero requested
  Validation,       // a tree or function violates a structural invariant
  Config,           // malformed configuration or unreadable input
  DepthExhausted,   // the truncated tree is too shallow for the request
  ResourceLimit,    // vertex cap or search cap exceeded
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace htlab
