// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "report/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace htlab {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { fail(ErrorCode::Config, where + ": " + what); }

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) bad(where, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!ok.count(it.key())) bad(where, "unknown key \"" + it.key() + "\"");
}

std::uint64_t get_uint(const json& j, const std::string& where) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  bad(where, "expected a nonnegative integer");
}

std::string scalar_text(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  bad(where, "expected a number or a string");
}

Rational get_rational(const json& j, const std::string& where) {
  try {
    return parse_rational(scalar_text(j, where));
  } catch (const Error& e) {
    bad(where, e.what());
  }
}

std::vector<std::size_t> get_levels(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array of levels");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_uint(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

FieldSpec parse_field(const std::string& name, const json* eps, const std::string& where) {
  try {
    if (name == "gf2") return FieldSpec::gf2();
    if (name == "rational" || name == "Q") return FieldSpec::rational();
    if (name == "approx_real") return FieldSpec::approx_real(eps ? eps->get<double>() : 1e-9);
    std::string digits;
    if (name.rfind("gf(", 0) == 0 && name.back() == ')')
      digits = name.substr(3, name.size() - 4);
    else if (name.rfind("gf", 0) == 0)
      digits = name.substr(2);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 19)
      return FieldSpec::gfp(std::stoull(digits));
  } catch (const Error& e) {
    bad(where, e.what());
  } catch (const json::exception& e) {
    bad(where, e.what());
  }
  bad(where, "unknown field \"" + name + "\" (gf2, gf<p>, rational, approx_real)");
}

StepSpec parse_step(const json& j, const std::string& where) {
  StepSpec s;
  if (j.is_number_unsigned() || j.is_number_integer()) {
    s.dense = get_uint(j, where);
    return s;
  }
  allow_keys(j, where, {"dense", "level", "values", "constant"});
  int forms = static_cast<int>(j.contains("dense")) + static_cast<int>(j.contains("values")) + static_cast<int>(j.contains("constant"));
  if (forms != 1) bad(where, "give exactly one of \"dense\", \"values\" or \"constant\"");
  if (j.contains("dense")) s.dense = get_uint(j["dense"], where + ".dense");
  if (j.contains("constant")) s.constant = j["constant"];
  if (j.contains("values")) {
    if (!j.contains("level")) bad(where, "\"values\" needs \"level\"");
    s.level = get_uint(j["level"], where + ".level");
    if (!j["values"].is_array()) bad(where + ".values", "expected an array");
    for (const auto& v : j["values"]) s.values.push_back(v);
  } else if (j.contains("level")) {
    bad(where, "\"level\" is only used with \"values\"");
  }
  return s;
}

std::vector<StepSpec> parse_steps(const json& j, const std::string& where) {
  if (!j.is_array()) bad(where, "expected an array");
  std::vector<StepSpec> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_step(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void parse_tree(const json& j, RunConfig& c) {
  allow_keys(j, "tree", {"depth", "field", "epsilon", "branching", "children", "q", "w", "materialize", "max_vertices"});
  TreeConfig& t = c.tree;
  if (!j.contains("depth")) bad("tree", "missing \"depth\"");
  t.depth = get_uint(j["depth"], "tree.depth");
  std::string fname = "rational";
  const json* eps = j.contains("epsilon") ? &j["epsilon"] : nullptr;
  if (j.contains("field")) {
    const json& f = j["field"];
    if (f.is_object() && f.size() == 1 && f.contains("gfp")) {
      fname = "gf" + std::to_string(get_uint(f["gfp"], "tree.field.gfp"));
    } else if (f.is_object() && f.size() == 1 && f.contains("approx_real")) {
      fname = "approx_real";
      if (!f["approx_real"].is_number()) bad("tree.field.approx_real", "expected a number");
      eps = &f["approx_real"];
    } else if (f.is_string()) {
      fname = f.get<std::string>();
    } else {
      bad("tree.field", "expected \"gf2\", {\"gfp\": p}, \"rational\" or {\"approx_real\": eps}");
    }
  }
  t.field = parse_field(fname, eps, "tree.field");

  if (j.contains("children") && j.contains("branching")) bad("tree", "give either \"branching\" or \"children\"");
  if (j.contains("children")) {
    TreeConfig::ExplicitChildren e;
    for (auto v : get_levels(j["children"], "tree.children")) e.counts.push_back(static_cast<std::uint32_t>(v));
    t.branching = e;
  } else if (j.contains("branching")) {
    const json& b = j["branching"];
    if (b.is_array()) {
      std::vector<std::uint32_t> list;
      for (auto v : get_levels(b, "tree.branching")) list.push_back(static_cast<std::uint32_t>(v));
      t.branching = list;
    } else {
      t.branching = static_cast<std::uint32_t>(get_uint(b, "tree.branching"));
    }
  }

  auto field_list = [&](const json& arr, const std::string& where) {
    if (!arr.is_array()) bad(where, "expected an array");
    std::vector<FieldElement> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse_scalar(t.field, arr[i]));
    return out;
  };
  auto rational_list = [&](const json& arr, const std::string& where) {
    if (!arr.is_array()) bad(where, "expected an array");
    std::vector<Rational> out;
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(get_rational(arr[i], where + "[" + std::to_string(i) + "]"));
    return out;
  };
  if (j.contains("q")) {
    const json& q = j["q"];
    if (q.is_string() && q.get<std::string>() == "uniform") {
      t.q = TreeConfig::Uniform{};
    } else if (q.is_array()) {
      t.q = TreeConfig::PerChild<Rational>{rational_list(q, "tree.q")};
    } else if (q.is_object() && q.contains("per_edge")) {
      allow_keys(q, "tree.q", {"per_edge"});
      t.q = TreeConfig::PerEdge<Rational>{rational_list(q["per_edge"], "tree.q.per_edge")};
    } else {
      bad("tree.q", "expected \"uniform\", a per-child array, or {\"per_edge\": [...]}");
    }
  }
  if (j.contains("w")) {
    const json& w = j["w"];
    if (w.is_string() && w.get<std::string>() == "ones") {
      t.w = TreeConfig::Ones{};
    } else if (w.is_string() && w.get<std::string>() == "q") {
      t.w = TreeConfig::FromQ{};
    } else if (w.is_array()) {
      t.w = TreeConfig::PerChild<FieldElement>{field_list(w, "tree.w")};
    } else if (w.is_object() && w.contains("per_edge")) {
      allow_keys(w, "tree.w", {"per_edge"});
      t.w = TreeConfig::PerEdge<FieldElement>{field_list(w["per_edge"], "tree.w.per_edge")};
    } else {
      bad("tree.w", "expected \"ones\", \"q\", a per-child array, or {\"per_edge\": [...]}");
    }
  }
  if (j.contains("materialize")) t.materialize = get_uint(j["materialize"], "tree.materialize");
  if (j.contains("max_vertices")) t.max_vertices = get_uint(j["max_vertices"], "tree.max_vertices");
}

}  // namespace

std::string StepSpec::name() const {
  if (dense) return "dense:" + std::to_string(*dense);
  if (constant) return "constant:" + constant->dump();
  return "step@" + std::to_string(level.value_or(0));
}

FieldElement parse_scalar(const FieldSpec& field, const json& v) {
  try {
    return field.parse(scalar_text(v, "scalar"));
  } catch (const Error& e) {
    fail(ErrorCode::Config, std::string("bad scalar ") + v.dump() + ": " + e.what());
  }
}

Vector parse_vector(const ValueSpace& space, const json& v) {
  std::vector<FieldElement> coords;
  if (v.is_array()) {
    for (const auto& x : v) coords.push_back(parse_scalar(space.field(), x));
  } else {
    coords.push_back(parse_scalar(space.field(), v));
  }
  if (coords.size() != space.dim())
    fail(ErrorCode::Config, "vector " + v.dump() + " has " + std::to_string(coords.size()) + " coordinates, expected " + std::to_string(space.dim()));
  return space.make(std::move(coords));
}

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Config, std::string("malformed JSON: ") + e.what());
  }
  RunConfig c;
  allow_keys(j, "config", {"tree", "space", "seed", "phi", "universal", "frequent", "genericity", "x", "schedule", "monte_carlo"});
  c.canonical = j.dump();
  if (j.contains("tree")) {
    parse_tree(j["tree"], c);
  } else {
    c.tree = TreeConfig::uniform(0, 2, FieldSpec::rational());
  }
  if (j.contains("space")) {
    const json& s = j["space"];
    allow_keys(s, "space", {"dim", "metric"});
    if (s.contains("dim")) c.dim = get_uint(s["dim"], "space.dim");
    if (s.contains("metric")) {
      if (!s["metric"].is_string()) bad("space.metric", "expected a string");
      c.metric = parse_metric(s["metric"].get<std::string>());
    }
  }
  if (j.contains("seed")) c.seed = get_uint(j["seed"], "seed");
  if (j.contains("phi")) {
    const json& p = j["phi"];
    if (p.is_object() && p.contains("levels")) {
      allow_keys(p, "phi", {"depth", "levels"});
      if (!p["levels"].is_array() || p["levels"].empty()) bad("phi.levels", "expected a nonempty array of levels");
      c.phi_levels = p;
    } else {
      c.phi = parse_step(p, "phi");
    }
  }

  if (j.contains("universal")) {
    const json& u = j["universal"];
    allow_keys(u, "universal", {"J", "tau", "targets"});
    UniversalConfig uc;
    if (u.contains("J")) uc.J = get_uint(u["J"], "universal.J");
    if (u.contains("tau")) uc.tau = get_levels(u["tau"], "universal.tau");
    if (u.contains("targets")) uc.targets = parse_steps(u["targets"], "universal.targets");
    c.universal = uc;
  }
  if (j.contains("frequent")) {
    const json& f = j["frequent"];
    allow_keys(f, "frequent", {"horizon", "M", "tau", "targets"});
    FrequentConfig fc;
    if (f.contains("horizon")) fc.horizon = get_uint(f["horizon"], "frequent.horizon");
    if (f.contains("M")) fc.M = static_cast<std::uint32_t>(get_uint(f["M"], "frequent.M"));
    if (f.contains("tau")) fc.tau = get_levels(f["tau"], "frequent.tau");
    if (f.contains("targets")) fc.targets = parse_steps(f["targets"], "frequent.targets");
    c.frequent = fc;
  }
  if (j.contains("genericity")) {
    const json& g = j["genericity"];
    allow_keys(g, "genericity", {"m", "coeffs", "targets", "stage_tolerance", "eps", "own_count"});
    GenericityConfig gc;
    if (g.contains("m")) gc.m = get_uint(g["m"], "genericity.m");
    if (g.contains("coeffs")) {
      if (!g["coeffs"].is_array()) bad("genericity.coeffs", "expected an array of coefficient lists");
      for (const auto& row : g["coeffs"]) {
        if (!row.is_array()) bad("genericity.coeffs", "expected an array of coefficient lists");
        gc.coeffs.emplace_back(row.begin(), row.end());
      }
    }
    if (g.contains("targets")) gc.targets = parse_steps(g["targets"], "genericity.targets");
    if (g.contains("stage_tolerance")) gc.stage_tolerance = get_rational(g["stage_tolerance"], "genericity.stage_tolerance");
    if (g.contains("eps")) gc.eps = get_rational(g["eps"], "genericity.eps");
    if (g.contains("own_count")) gc.own_count = get_uint(g["own_count"], "genericity.own_count");
    c.genericity = gc;
  }
  if (j.contains("x")) {
    const json& x = j["x"];
    allow_keys(x, "x", {"balls", "hold_ratio", "min_upper_density"});
    XConfig xc;
    if (x.contains("balls")) {
      if (!x["balls"].is_array()) bad("x.balls", "expected an array");
      for (std::size_t i = 0; i < x["balls"].size(); ++i) {
        std::string where = "x.balls[" + std::to_string(i) + "]";
        const json& b = x["balls"][i];
        allow_keys(b, where, {"target", "radius"});
        if (!b.contains("target") || !b.contains("radius")) bad(where, "needs \"target\" and \"radius\"");
        xc.balls.push_back({parse_step(b["target"], where + ".target"), get_rational(b["radius"], where + ".radius")});
      }
    }
    if (x.contains("hold_ratio")) xc.hold_ratio = get_rational(x["hold_ratio"], "x.hold_ratio");
    if (x.contains("min_upper_density")) xc.min_upper_density = get_rational(x["min_upper_density"], "x.min_upper_density");
    c.x = xc;
  }
  if (j.contains("schedule")) {
    const json& s = j["schedule"];
    allow_keys(s, "schedule", {"horizon", "M", "window", "series_points"});
    ScheduleConfig sc;
    if (s.contains("horizon")) sc.horizon = get_uint(s["horizon"], "schedule.horizon");
    if (s.contains("M")) sc.M = static_cast<std::uint32_t>(get_uint(s["M"], "schedule.M"));
    if (s.contains("window")) sc.window = get_uint(s["window"], "schedule.window");
    if (s.contains("series_points")) sc.series_points = get_uint(s["series_points"], "schedule.series_points");
    c.schedule = sc;
  }
  if (j.contains("monte_carlo")) {
    const json& m = j["monte_carlo"];
    allow_keys(m, "monte_carlo", {"samples", "pairs"});
    if (m.contains("samples")) c.monte_carlo.samples = get_uint(m["samples"], "monte_carlo.samples");
    if (m.contains("pairs")) c.monte_carlo.pairs = get_uint(m["pairs"], "monte_carlo.pairs");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Config, "cannot read config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Config, "error while reading " + path);
  return parse_config(ss.str());
}

StepFunction resolve_step(const WeightedTree& t, const ValueSpace& space, const StepSpec& s) {
  if (s.dense) return dense_target(t, space, *s.dense);
  if (s.constant) return constant_step(parse_vector(space, *s.constant));
  StepFunction h;
  h.level = s.level.value_or(0);
  for (const auto& v : s.values) h.values.push_back(parse_vector(space, v));
  try {
    check_step(t, space, h);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::DepthExhausted) throw;
    fail(ErrorCode::Config, "step function at level " + std::to_string(h.level) + ": " + e.what());
  }
  return h;
}

TreeFunction resolve_phi(const WeightedTree& t, const ValueSpace& space, const RunConfig& c) {
  if (c.phi_levels) {
    const json& p = *c.phi_levels;
    std::vector<std::vector<Vector>> levels;
    for (const auto& level : p["levels"]) {
      if (!level.is_array()) fail(ErrorCode::Config, "phi.levels: every level must be an array");
      std::vector<Vector> row;
      for (const auto& v : level) row.push_back(parse_vector(space, v));
      levels.push_back(std::move(row));
    }
    std::size_t depth = p.contains("depth") ? get_uint(p["depth"], "phi.depth") : levels.size() - 1;
    if (depth + 1 < levels.size()) fail(ErrorCode::Config, "phi.depth is smaller than the number of listed levels");
    TreeFunction f(depth, std::move(levels));
    try {
      check_function(t, space, f);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DepthExhausted) throw;
      fail(ErrorCode::Config, std::string("phi: ") + e.what());
    }
    return f;
  }
  if (!c.phi) return constant_function(space.zero(), 0);
  return harmonic_from_level(t, space, resolve_step(t, space, *c.phi));
}

}  // namespace htlab
