// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

// htlab validate|universal|frequent|genericity|x|schedule --config <path>
//       [--out <dir>] [--seed <u64>]
//
// Exit codes: 0 ok, 1 verification failure, 2 I/O or config error,
// 3 depth or resource exhaustion.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "htlab/htlab.h"

namespace {

int exit_code(htlab_status s) {
  switch (s) {
    case HTLAB_OK:
      return 0;
    case HTLAB_VERIFICATION_FAILED:
      return 1;
    case HTLAB_DEPTH_EXHAUSTED:
      return 3;
    default:
      return 2;
  }
}

bool write_file(const std::filesystem::path& p, const char* data, size_t size) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(data, static_cast<std::streamsize>(size));
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Harmonic functions on weighted trees: builders, certificates and reports"};
  app.set_version_flag("--version", std::string(htlab_version()));
  std::string command, config, out_dir = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "validate | universal | frequent | genericity | x | schedule")
      ->required()
      ->check(CLI::IsMember({"validate", "universal", "frequent", "genericity", "x", "schedule"}));
  app.add_option("--config", config, "JSON run configuration")->required();
  app.add_option("--out", out_dir, "directory for report files");
  app.add_option("--seed", seed, "seed for the Monte Carlo cross-checks (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  htlab_session* session = nullptr;
  htlab_status st = htlab_session_open(config.c_str(), &session);
  if (st != HTLAB_OK) {
    std::cerr << "htlab: " << htlab_last_error() << "\n";
    return exit_code(st);
  }
  if (seed) htlab_session_set_seed(session, *seed);

  htlab_report* report = nullptr;
  st = htlab_run(session, command.c_str(), &report);
  if (!report) {
    std::cerr << "htlab: " << htlab_last_error() << "\n";
    htlab_session_close(session);
    return exit_code(st);
  }

  int rc = exit_code(st);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "htlab: cannot create " << out_dir << ": " << ec.message() << "\n";
    rc = 2;
  } else {
    for (size_t i = 0; i < htlab_report_artifact_count(report); ++i) {
      size_t size = 0;
      const char* data = htlab_report_artifact_data(report, i, &size);
      std::filesystem::path p = std::filesystem::path(out_dir) / htlab_report_artifact_name(report, i);
      if (!write_file(p, data, size)) {
        std::cerr << "htlab: cannot write " << p.string() << "\n";
        rc = 2;
      }
    }
  }
  std::cout << command << ": " << htlab_status_name(htlab_report_status(report)) << ": " << htlab_report_summary(report) << "\n";
  htlab_report_free(report);
  htlab_session_close(session);
  return rc;
}
