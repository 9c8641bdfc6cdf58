// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <json.hpp>

#include "../support/generators.hpp"
#include "report/commands.hpp"

using namespace htlab;
using testing::error_of;
using nlohmann::json;

namespace {

const Artifact* find(const CommandResult& r, const std::string& name) {
  for (const auto& a : r.artifacts)
    if (a.name == name) return &a;
  return nullptr;
}

json report_of(const CommandResult& r, const std::string& command) {
  const Artifact* a = find(r, command + ".json");
  REQUIRE(a != nullptr);
  return json::parse(a->data);
}

const char* kGf2 = R"({"tree": {"depth": 12, "field": "gf2", "branching": 2},
                        "space": {"dim": 1, "metric": "discrete"},
                        "universal": {"J": 4},
                        "frequent": {"horizon": 6},
                        "schedule": {"horizon": 64, "M": 3},
                        "monte_carlo": {"samples": 2000, "pairs": 2},
                        "seed": 5})";

}  // namespace

TEST_CASE("config parsing") {
  RunConfig c = parse_config(kGf2);
  CHECK(c.tree.depth == 12);
  CHECK(c.tree.field == FieldSpec::gf2());
  CHECK(c.seed == 5);
  REQUIRE(c.universal);
  CHECK(c.universal->J == 4);
  CHECK(c.schedule->horizon == 64);

  RunConfig r = parse_config(R"({"tree": {"depth": 3, "field": {"gfp": 7}, "q": ["1/4", 0.75], "w": [2, 3]}})");
  CHECK(r.tree.field == FieldSpec::gfp(7));
  auto* q = std::get_if<TreeConfig::PerChild<Rational>>(&r.tree.q);
  REQUIRE(q);
  CHECK(q->values[1] == Rational(3, 4));

  CHECK(parse_config(R"j({"tree": {"depth": 2, "field": "gf(5)"}})j").tree.field == FieldSpec::gfp(5));
  CHECK(parse_config(R"({"tree": {"depth": 2, "field": {"approx_real": 1e-6}}, "space": {"metric": "euclidean"}})").tree.field.kind() ==
        FieldKind::ApproxReal);
}

TEST_CASE("config errors") {
  CHECK(error_of([] { parse_config("{"); }) == ErrorCode::Config);
  CHECK(error_of([] { parse_config(R"({"tree": {"depth": 2}, "bogus": 1})"); }) == ErrorCode::Config);
  CHECK(error_of([] { parse_config(R"({"tree": {"depth": 2, "field": "gf4"}})"); }) != std::nullopt);
  CHECK(error_of([] { parse_config(R"({"tree": {"field": "gf2"}})"); }) == ErrorCode::Config);
  CHECK(error_of([] { load_config("/nonexistent/htlab.json"); }) == ErrorCode::Config);
  CHECK(outcome_for(ErrorCode::Validation) == Outcome::VerificationFailed);
  CHECK(outcome_for(ErrorCode::DepthExhausted) == Outcome::DepthExhausted);
  CHECK(outcome_for(ErrorCode::Config) == Outcome::ConfigError);
}

TEST_CASE("config hash tracks content, not layout") {
  RunConfig a = parse_config(R"({"seed": 1, "tree": {"depth": 2}})");
  RunConfig b = parse_config("{\n  \"tree\": {\"depth\": 2},\n  \"seed\": 1\n}");
  RunConfig c = parse_config(R"({"seed": 2, "tree": {"depth": 2}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 64);
}

TEST_CASE("validate") {
  RunConfig c = parse_config(kGf2);
  auto r = run_command("validate", c);
  CHECK(r.status == Outcome::Ok);
  json j = report_of(r, "validate");
  CHECK(j["status"] == "ok");
  CHECK(j["config_sha256"] == config_hash(c));

  RunConfig bad = parse_config(R"({"tree": {"depth": 2, "q": [0.45, 0.45]}})");
  auto rb = run_command("validate", bad);
  CHECK(rb.status == Outcome::VerificationFailed);
  CHECK(rb.summary.find("vertex (0,0)") != std::string::npos);
}

TEST_CASE("universal") {
  auto r = run_command("universal", parse_config(kGf2));
  CHECK(r.status == Outcome::Ok);
  const Artifact* csv = find(r, "universal_certificate.csv");
  REQUIRE(csv);
  std::size_t lines = 0;
  for (char ch : csv->data) lines += ch == '\n';
  CHECK(lines == 5);  // header + 4 entries
  CHECK(r.summary.find("4/4") != std::string::npos);
}

TEST_CASE("frequent and its depth limit") {
  auto r = run_command("frequent", parse_config(kGf2));
  CHECK(r.status == Outcome::Ok);
  CHECK(find(r, "frequent_hits.csv"));
  CHECK(find(r, "frequent_density.csv"));
  RunConfig deep = parse_config(R"({"tree": {"depth": 8, "field": "gf2"}, "frequent": {"horizon": 8}})");
  CHECK(run_command("frequent", deep).status == Outcome::DepthExhausted);
}

TEST_CASE("x rejects GF(2) with unit weights") {
  RunConfig c = parse_config(R"({"tree": {"depth": 8, "field": "gf2"}, "x": {"balls": [{"target": {"dense": 1}, "radius": "1/2"}]}})");
  auto r = run_command("x", c);
  CHECK(r.status == Outcome::VerificationFailed);
  CHECK(report_of(r, "x").contains("error"));
}

TEST_CASE("schedule") {
  auto r = run_command("schedule", parse_config(R"({"schedule": {"horizon": 4}})"));
  CHECK(r.status == Outcome::Ok);
  const Artifact* csv = find(r, "schedule.csv");
  REQUIRE(csv);
  CHECK(csv->data.find("1,1,1\n2,2,3\n3,1,4\n4,3,7\n") != std::string::npos);
  CHECK(run_command("schedule", parse_config(R"({"schedule": {"horizon": 1}})")).status == Outcome::ConfigError);
}

TEST_CASE("unknown commands are configuration errors") {
  CHECK(run_command("launch", parse_config(kGf2)).status == Outcome::ConfigError);
}

TEST_CASE("identical config and seed give identical artifacts") {
  RunConfig c = parse_config(kGf2);
  for (const auto& cmd : command_names()) {
    if (cmd == "genericity" || cmd == "x") continue;
    auto a = run_command(cmd, c, 9), b = run_command(cmd, c, 9);
    REQUIRE(a.artifacts.size() == b.artifacts.size());
    for (std::size_t i = 0; i < a.artifacts.size(); ++i) {
      CHECK(a.artifacts[i].name == b.artifacts[i].name);
      CHECK(a.artifacts[i].data == b.artifacts[i].data);
    }
  }
  CHECK(report_of(run_command("validate", c, 9), "validate")["seed"] == 9);
}
