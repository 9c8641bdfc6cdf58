// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "report/commands.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <bit>
#include <new>
#include <random>

#include "core/error.hpp"

namespace htlab {

using json = nlohmann::json;

namespace {

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Exact values are kept when their text stays readable; the double is
// always present.
json real_json(const Real& r) {
  json j;
  j["value"] = r.approx();
  if (r.is_exact()) {
    std::string s = to_string(r.exact());
    if (s.size() <= 160)
      j["exact"] = s;
    else
      j["exact_digits"] = s.size();
  }
  return j;
}

std::string csv_real(const Real& r) {
  if (r.is_exact()) {
    std::string s = to_string(r.exact());
    if (s.size() <= 160) return s;
  }
  return fmt(r.approx());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json tree_json(const WeightedTree& t) {
  return {{"depth", t.depth()}, {"stored_depth", t.materialized_depth()}, {"stored_vertices", t.vertex_count()}, {"field", t.field().name()}};
}

json space_json(const ValueSpace& s) { return {{"dim", s.dim()}, {"metric", to_string(s.metric_kind())}, {"field", s.field().name()}}; }

ValueSpace make_space(const RunConfig& c) { return ValueSpace(c.tree.field, c.dim, c.metric); }

std::vector<std::string> names_of(const std::vector<StepSpec>& specs) {
  std::vector<std::string> out;
  for (const auto& s : specs) out.push_back(s.name());
  return out;
}

std::vector<StepFunction> resolve_all(const WeightedTree& t, const ValueSpace& space, const std::vector<StepSpec>& specs) {
  std::vector<StepFunction> out;
  for (const auto& s : specs) out.push_back(resolve_step(t, space, s));
  return out;
}

json density_json(const DensityReport& d) {
  return {{"set", d.set},
          {"window", d.window},
          {"hits", d.hits},
          {"lower", to_string(d.lower)},
          {"lower_value", d.lower.get_d()},
          {"lower_at", d.lower_at},
          {"upper", to_string(d.upper)},
          {"upper_value", d.upper.get_d()},
          {"upper_at", d.upper_at}};
}

// Long-format density series rows "label,N,hits,proxy".
void append_series(std::string& csv, const std::string& label, const std::vector<std::uint64_t>& set, std::uint64_t W,
                   const std::vector<std::uint64_t>& points) {
  auto counts = running_counts(set, W);
  for (auto N : points) csv += label + "," + std::to_string(N) + "," + std::to_string(counts[N]) + "," + fmt(double(counts[N]) / double(N + 1)) + "\n";
}

std::vector<std::uint64_t> all_points(std::uint64_t W) {
  std::vector<std::uint64_t> p;
  for (std::uint64_t N = 0; N <= W; ++N) p.push_back(N);
  return p;
}

struct Run {
  const RunConfig& cfg;
  std::uint64_t seed;
  json report;
  std::vector<Artifact> extra;
  std::string summary;
};

bool same_on_levels(const WeightedTree& t, const TreeFunction& a, const TreeFunction& b, std::size_t upto, const ValueSpace& space) {
  for (std::size_t n = 0; n <= upto; ++n)
    for (std::uint64_t i = 0; i < t.level_size(n); ++i)
      if (!space.equal(a.value(t, {n, i}), b.value(t, {n, i}))) return false;
  return true;
}

Outcome cmd_validate(Run& run) {
  json checks = json::array();
  bool all_ok = true;
  auto check = [&](const std::string& name, bool ok, json detail) {
    checks.push_back({{"name", name}, {"ok", ok}, {"detail", std::move(detail)}});
    all_ok = all_ok && ok;
  };

  auto outcome = try_build_tree(run.cfg.tree);
  check("tree invariants", outcome.tree.has_value(), outcome.issues);
  if (!outcome.tree) {
    run.report["checks"] = checks;
    run.summary = "invalid tree: " + outcome.issues.front();
    return Outcome::VerificationFailed;
  }
  const WeightedTree& t = *outcome.tree;
  run.report["tree"] = tree_json(t);

  // Sector measures on the stored levels.
  json measure = json::array();
  for (std::size_t n = 0; n <= t.materialized_depth() && measure.size() < 20; ++n) {
    Rational total(0);
    for (std::uint64_t i = 0; i < t.level_size(n); ++i) {
      VertexRef x{n, i};
      total += t.sector_prob(x);
      if (n < t.materialized_depth()) {
        Rational below(0);
        for (std::uint32_t k = 0; k < t.child_count(x); ++k) below += t.sector_prob(t.child(x, k));
        if (below != t.sector_prob(x) && measure.size() < 20)
          measure.push_back("vertex " + to_string(x) + ": children carry " + to_string(below) + " of " + to_string(t.sector_prob(x)));
      }
    }
    if (total != 1) measure.push_back("level " + std::to_string(n) + ": sector measures sum to " + to_string(total));
  }
  check("sector measures", measure.empty(), measure);

  // Field axioms on the first elements of the field's enumeration.
  const FieldSpec& F = t.field();
  json field_issues = json::array();
  std::vector<FieldElement> sample;
  for (std::uint64_t i = 0; i < 12; ++i) sample.push_back(F.element(i));
  for (const auto& a : sample) {
    if (!(a + (-a)).is_zero()) field_issues.push_back(a.to_string() + " + (-" + a.to_string() + ") != 0");
    if (!(a * F.one() == a)) field_issues.push_back(a.to_string() + " * 1 != itself");
    if (!a.is_zero() && !(a * a.inv() == F.one())) field_issues.push_back(a.to_string() + " * inverse != 1");
    for (const auto& b : sample)
      for (std::size_t c = 0; c < 4; ++c)
        if (!((a + b) * sample[c] == a * sample[c] + b * sample[c]))
          field_issues.push_back("distributivity fails for " + a.to_string() + ", " + b.to_string() + ", " + sample[c].to_string());
  }
  check("field axioms", field_issues.empty(), field_issues);

  std::optional<ValueSpace> space;
  try {
    space.emplace(make_space(run.cfg));
    run.report["space"] = space_json(*space);
    check("value space", true, json::array());
  } catch (const Error& e) {
    check("value space", false, json::array({e.what()}));
  }

  auto a2 = assumption2_violation(t, 0, t.depth());
  run.report["weights_sum_to_one"] = !a2.has_value();
  if (a2) run.report["weights_sum_to_one_detail"] = *a2;

  if (space && (run.cfg.phi || run.cfg.phi_levels)) {
    TreeFunction phi = resolve_phi(t, *space, run.cfg);
    auto h = is_harmonic(t, *space, phi);
    check("seed harmonic", h.ok, h.violations);
  }

  if (space && run.cfg.monte_carlo.pairs > 0) {
    std::mt19937_64 rng(run.seed);
    const std::uint64_t N = run.cfg.monte_carlo.samples;
    double tol = 4.0 / std::sqrt(double(N));
    json rows = json::array();
    bool ok = true;
    for (std::size_t p = 0; p < run.cfg.monte_carlo.pairs; ++p) {
      StepFunction h, g;
      try {
        h = dense_target(t, *space, 2 * p + 1);
        g = dense_target(t, *space, 3 * p + 2);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DepthExhausted) throw;
        rows.push_back({{"pair", p}, {"skipped", e.what()}});
        continue;
      }
      Real exact = dP(t, *space, h, g);
      double est = dP_monte_carlo(t, *space, h, g, N, rng);
      bool good = std::fabs(est - exact.approx()) <= tol;
      ok = ok && good;
      rows.push_back({{"pair", p}, {"h", "dense:" + std::to_string(2 * p + 1)}, {"g", "dense:" + std::to_string(3 * p + 2)}, {"exact", real_json(exact)},
                      {"estimate", est}, {"tolerance", tol}, {"ok", good}});
    }
    check("monte carlo dP", ok, rows);
  }

  run.report["checks"] = checks;
  std::size_t failed = 0;
  for (const auto& c : checks)
    if (!c["ok"].get<bool>()) ++failed;
  run.summary = std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " checks passed";
  return all_ok ? Outcome::Ok : Outcome::VerificationFailed;
}

Outcome cmd_universal(Run& run) {
  WeightedTree t = build_tree(run.cfg.tree);
  ValueSpace space = make_space(run.cfg);
  run.report["tree"] = tree_json(t);
  run.report["space"] = space_json(space);
  TreeFunction phi = resolve_phi(t, space, run.cfg);
  UniversalConfig uc = run.cfg.universal.value_or(UniversalConfig{});
  UniversalOptions o;
  o.J = uc.J;
  o.tau = uc.tau;
  o.targets = resolve_all(t, space, uc.targets);
  o.target_names = names_of(uc.targets);
  UniversalResult r = build_universal(t, space, phi, o);
  auto bad = verify_certificate(t, space, r);
  std::size_t N = std::min(phi.depth(), t.materialized_depth());
  bool agrees = same_on_levels(t, r.F, phi, N, space);
  if (!agrees) bad.push_back("F differs from the seed on levels 0.." + std::to_string(N));

  json cert = json::array();
  std::string csv = "j,target,front,level,achieved,bound,slot_mass\n";
  for (const auto& e : r.certificate) {
    cert.push_back({{"j", e.j}, {"target", e.target}, {"front", e.front}, {"level", e.level}, {"achieved", real_json(e.achieved)},
                    {"bound", to_string(e.bound)}, {"slot_mass", to_string(e.slot_mass)}});
    csv += std::to_string(e.j) + "," + e.target + "," + std::to_string(e.front) + "," + std::to_string(e.level) + "," + csv_real(e.achieved) + "," +
           to_string(e.bound) + "," + to_string(e.slot_mass) + "\n";
  }
  run.extra.push_back({"universal_certificate.csv", csv});
  run.report["seed_depth"] = phi.depth();
  run.report["certificate"] = cert;
  run.report["complete"] = r.complete;
  run.report["agrees_with_seed"] = agrees;
  run.report["F_depth"] = r.F.depth();
  run.report["failures"] = bad;
  if (!r.message.empty()) run.report["message"] = r.message;
  run.summary = std::to_string(r.certificate.size()) + "/" + std::to_string(o.J) + " targets certified";
  for (const auto& e : r.certificate)
    run.summary += "\n  j=" + std::to_string(e.j) + "  k_j=" + std::to_string(e.level) + "  achieved=" + csv_real(e.achieved) + "  bound=" + to_string(e.bound);
  if (!bad.empty()) return Outcome::VerificationFailed;
  if (!r.complete) {
    run.summary += "; " + r.message;
    return Outcome::DepthExhausted;
  }
  return Outcome::Ok;
}

Outcome cmd_frequent(Run& run) {
  WeightedTree t = build_tree(run.cfg.tree);
  ValueSpace space = make_space(run.cfg);
  run.report["tree"] = tree_json(t);
  run.report["space"] = space_json(space);
  TreeFunction phi = resolve_phi(t, space, run.cfg);
  FrequentConfig fc = run.cfg.frequent.value_or(FrequentConfig{});
  FrequentOptions o;
  o.horizon = fc.horizon;
  o.M = fc.M;
  o.targets = resolve_all(t, space, fc.targets);
  o.target_names = names_of(fc.targets);
  FrequentResult r = fc.tau.empty() ? build_frequent(t, space, phi, o) : build_frequent_tau(t, space, fc.tau, phi, o);
  auto bad = verify_frequent(t, space, r);

  json hits = json::array();
  std::string csv = "k,r_k,level,ell,target,achieved,bound,slot_mass\n";
  for (const auto& h : r.hits) {
    hits.push_back({{"k", h.k}, {"r_k", h.index}, {"level", h.level}, {"ell", h.ell}, {"target", h.target}, {"achieved", real_json(h.achieved)},
                    {"bound", to_string(h.bound)}, {"slot_mass", to_string(h.slot_mass)}});
    csv += std::to_string(h.k) + "," + std::to_string(h.index) + "," + std::to_string(h.level) + "," + std::to_string(h.ell) + "," + h.target + "," +
           csv_real(h.achieved) + "," + to_string(h.bound) + "," + to_string(h.slot_mass) + "\n";
  }
  run.extra.push_back({"frequent_hits.csv", csv});

  json dens = json::array();
  std::string series = "m,N,hits,proxy\n";
  if (!r.hits.empty() && r.hits.back().index >= 2) {
    std::uint64_t W = r.hits.back().index;
    for (std::uint32_t m = 1; m <= o.M; ++m) {
      std::vector<std::uint64_t> set;
      for (const auto& h : r.hits)
        if (h.ell == m) set.push_back(h.index);
      dens.push_back(density_json(density(set, W, "r_k with l(k) = " + std::to_string(m))));
      append_series(series, std::to_string(m), set, W, all_points(W));
    }
  }
  run.extra.push_back({"frequent_density.csv", series});

  run.report["seed_depth"] = phi.depth();
  run.report["first_stage"] = r.first_stage;
  run.report["padded_to"] = r.padded_to;
  if (!r.tau.empty()) run.report["tau"] = r.tau;
  run.report["hits"] = hits;
  run.report["density"] = dens;
  run.report["complete"] = r.complete;
  run.report["failures"] = bad;
  if (!r.message.empty()) run.report["message"] = r.message;
  run.summary = std::to_string(r.hits.size()) + " hits through k = " + std::to_string(r.hits.empty() ? 0 : r.hits.back().k);
  if (!bad.empty()) return Outcome::VerificationFailed;
  if (!r.complete) {
    run.summary += "; " + r.message;
    return Outcome::DepthExhausted;
  }
  return Outcome::Ok;
}

Outcome cmd_genericity(Run& run) {
  WeightedTree t = build_tree(run.cfg.tree);
  ValueSpace space = make_space(run.cfg);
  run.report["tree"] = tree_json(t);
  run.report["space"] = space_json(space);
  GenericityConfig gc = run.cfg.genericity.value_or(GenericityConfig{});
  if (gc.m == 0) fail(ErrorCode::Config, "genericity.m must be at least 1");
  if (gc.coeffs.empty()) gc.coeffs.push_back(std::vector<json>(gc.m, json(1)));
  if (gc.targets.empty())
    for (std::uint64_t j = 1; j <= 3; ++j) gc.targets.push_back(StepSpec{j, {}, {}, {}});

  std::vector<std::vector<FieldElement>> rows;
  for (std::size_t r = 0; r < gc.coeffs.size(); ++r) {
    if (gc.coeffs[r].size() != gc.m)
      fail(ErrorCode::Config, "genericity.coeffs[" + std::to_string(r) + "] has " + std::to_string(gc.coeffs[r].size()) + " entries, expected " +
                                  std::to_string(gc.m));
    std::vector<FieldElement> row;
    for (const auto& v : gc.coeffs[r]) row.push_back(parse_scalar(space.field(), v));
    if (row.back().is_zero()) fail(ErrorCode::Config, "genericity.coeffs[" + std::to_string(r) + "]: the last coefficient must be nonzero");
    rows.push_back(std::move(row));
  }
  std::vector<StepFunction> targets = resolve_all(t, space, gc.targets);
  std::vector<std::string> target_names = names_of(gc.targets);

  // f_m carries a_m^{-1} h for every distinct last coefficient a_m.
  std::vector<FieldElement> lasts;
  for (const auto& row : rows) {
    bool seen = false;
    for (const auto& a : lasts) seen = seen || a == row.back();
    if (!seen) lasts.push_back(row.back());
  }
  SpanningOptions so;
  so.m = gc.m;
  so.stage_tolerance = gc.stage_tolerance;
  so.own_count = gc.own_count;
  for (const auto& a : lasts)
    for (std::size_t i = 0; i < targets.size(); ++i) {
      StepFunction h = targets[i];
      FieldElement ainv = a.inv();
      for (auto& v : h.values) v = space.scale(ainv, v);
      so.last_targets.push_back(std::move(h));
      so.last_target_names.push_back(target_names[i] + " / " + a.to_string());
    }
  SpanningFamily fam = build_spanning_family(t, space, so);

  json members = json::array();
  for (std::size_t k = 0; k < fam.members.size(); ++k) {
    const auto& mem = fam.members[k];
    json stages = json::array();
    for (const auto& s : mem.stages)
      stages.push_back({{"zero", s.zero}, {"target", s.target}, {"level", s.level}, {"achieved", real_json(s.achieved)}, {"slot_mass", to_string(s.slot_mass)}});
    members.push_back({{"k", k + 1}, {"agree_depth", mem.agree_depth}, {"rho_to_stub", real_json(mem.rho)}, {"stages", stages}, {"zero_levels", fam.tau[k + 1]}});
  }
  run.report["members"] = members;
  run.report["stage_tolerance"] = to_string(gc.stage_tolerance);
  run.report["eps"] = to_string(gc.eps);

  bool ok = true;
  json witnesses = json::array();
  std::string csv = "row,coefficients,target,found,level,distance\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::string coeff_text;
    for (const auto& a : rows[r]) coeff_text += (coeff_text.empty() ? "" : " ") + a.to_string();
    auto lin = check_linearity(t, space, fam, rows[r]);
    ok = ok && lin.empty();
    for (std::size_t i = 0; i < targets.size(); ++i) {
      SpanWitness w = verify_span(t, space, fam, rows[r], targets[i], gc.eps);
      ok = ok && w.found;
      json entry = {{"row", r}, {"coefficients", coeff_text}, {"target", target_names[i]}, {"found", w.found}, {"linearity_failures", lin}};
      if (w.found) {
        entry["level"] = w.level;
        entry["distance"] = real_json(w.distance);
      }
      witnesses.push_back(entry);
      csv += std::to_string(r) + "," + coeff_text + "," + target_names[i] + "," + (w.found ? "1" : "0") + "," + (w.found ? std::to_string(w.level) : "") +
             "," + (w.found ? csv_real(w.distance) : "") + "\n";
    }
  }
  run.extra.push_back({"genericity_witnesses.csv", csv});
  run.report["witnesses"] = witnesses;
  run.summary = std::to_string(rows.size() * targets.size()) + " combinations checked";
  return ok ? Outcome::Ok : Outcome::VerificationFailed;
}

Outcome cmd_x(Run& run) {
  WeightedTree t = build_tree(run.cfg.tree);
  ValueSpace space = make_space(run.cfg);
  run.report["tree"] = tree_json(t);
  run.report["space"] = space_json(space);
  TreeFunction phi = resolve_phi(t, space, run.cfg);
  XConfig xc = run.cfg.x.value_or(XConfig{});
  if (xc.balls.empty()) fail(ErrorCode::Config, "x.balls must list at least one ball");
  XOptions o;
  o.hold_ratio = xc.hold_ratio;
  for (const auto& b : xc.balls) {
    o.balls.push_back({resolve_step(t, space, b.target), b.radius});
    o.names.push_back(b.target.name());
  }
  XResult r = build_X(t, space, phi, o);

  bool holds_ok = true;
  json visits = json::array();
  std::string csv = "ball,round,front,gap,hit_level,hold_end,achieved,hold_verified\n";
  for (const auto& v : r.visits) {
    holds_ok = holds_ok && v.hold_verified;
    visits.push_back({{"ball", v.ball + 1}, {"round", v.round}, {"front", v.front}, {"gap", v.gap}, {"hit_level", v.hit_level}, {"hold_end", v.hold_end},
                      {"achieved", real_json(v.achieved)}, {"hold_verified", v.hold_verified}});
    csv += std::to_string(v.ball + 1) + "," + std::to_string(v.round) + "," + std::to_string(v.front) + "," + std::to_string(v.gap) + "," +
           std::to_string(v.hit_level) + "," + std::to_string(v.hold_end) + "," + csv_real(v.achieved) + "," + (v.hold_verified ? "1" : "0") + "\n";
  }
  run.extra.push_back({"x_visits.csv", csv});

  bool dens_ok = true, all_visited = true;
  json balls = json::array();
  std::string series = "ball,N,hits,proxy\n";
  for (std::size_t b = 0; b < r.balls.size(); ++b) {
    const auto& rep = r.balls[b];
    bool visited = false;
    for (const auto& v : r.visits) visited = visited || v.ball == b;
    all_visited = all_visited && visited;
    if (xc.min_upper_density && rep.density.upper < *xc.min_upper_density) dens_ok = false;
    balls.push_back({{"ball", b + 1}, {"target", o.names[b]}, {"radius", to_string(o.balls[b].radius)}, {"visited", visited}, {"members", rep.members},
                     {"density", density_json(rep.density)}});
    append_series(series, std::to_string(b + 1), rep.members, rep.density.window, all_points(rep.density.window));
  }
  run.extra.push_back({"x_density.csv", series});
  run.report["visits"] = visits;
  run.report["balls"] = balls;
  run.report["hold_ratio"] = to_string(o.hold_ratio);
  if (xc.min_upper_density) run.report["min_upper_density"] = to_string(*xc.min_upper_density);
  if (!r.message.empty()) run.report["message"] = r.message;
  run.summary = std::to_string(r.visits.size()) + " visits over " + std::to_string(r.balls.size()) + " balls";
  if (!holds_ok || !dens_ok) return Outcome::VerificationFailed;
  if (!all_visited) {
    run.summary += "; depth ran out before every ball was visited";
    return Outcome::DepthExhausted;
  }
  return Outcome::Ok;
}

Outcome cmd_schedule(Run& run) {
  ScheduleConfig sc = run.cfg.schedule.value_or(ScheduleConfig{});
  if (sc.horizon < 2) fail(ErrorCode::Config, "schedule.horizon must be at least 2");
  if (sc.M == 0) fail(ErrorCode::Config, "schedule.M must be at least 1");
  Schedule s = make_schedule(sc.horizon);

  // Identity (i): r at powers of two; identity (ii): l-value counts up to
  // each power of two, both in one pass.
  json failures = json::array();
  std::vector<std::uint64_t> per_m(66, 0);
  unsigned checked_n = 0;
  for (std::uint64_t k = 1; k <= sc.horizon; ++k) {
    ++per_m[s.ell[k - 1]];
    if ((k & (k - 1)) != 0) continue;
    unsigned n = static_cast<unsigned>(std::countr_zero(k));
    checked_n = n;
    std::uint64_t want = (std::uint64_t{1} << (n + 1)) - 1;
    if (s.r[k - 1] != want) failures.push_back("r(2^" + std::to_string(n) + ") = " + std::to_string(s.r[k - 1]) + ", expected " + std::to_string(want));
    for (unsigned m = 1; m <= n; ++m)
      if (per_m[m] != (std::uint64_t{1} << (n - m)))
        failures.push_back("count(" + std::to_string(n) + "," + std::to_string(m) + ") = " + std::to_string(per_m[m]) + ", expected 2^" +
                           std::to_string(n - m));
  }

  std::uint64_t rmax = s.r.back();
  std::uint64_t W = sc.window == 0 ? rmax : sc.window;
  if (W > rmax) fail(ErrorCode::Config, "schedule.window " + std::to_string(W) + " exceeds r_horizon = " + std::to_string(rmax));
  if (W < 2) fail(ErrorCode::Config, "schedule.window must be at least 2");
  std::vector<std::uint64_t> points;
  std::size_t P = std::max<std::size_t>(sc.series_points, 2);
  for (std::size_t i = 0; i < P; ++i) {
    std::uint64_t N = static_cast<std::uint64_t>((static_cast<unsigned __int128>(W) * i) / (P - 1));
    if (points.empty() || points.back() != N) points.push_back(N);
  }
  json dens = json::array();
  std::string series = "m,N,hits,proxy\n";
  for (std::uint32_t m = 1; m <= sc.M; ++m) {
    auto set = r_values_with_ell(s, m, W);
    DensityReport d = density(set, W, "r_k with l(k) = " + std::to_string(m));
    json dj = density_json(d);
    dj["m"] = m;
    dj["reference"] = to_string(pow2_neg(m + 1));
    dens.push_back(dj);
    append_series(series, std::to_string(m), set, W, points);
  }

  std::string csv = "k,ell,r\n";
  csv.reserve(static_cast<std::size_t>(sc.horizon) * 16);
  for (std::uint64_t k = 1; k <= sc.horizon; ++k) csv += std::to_string(k) + "," + std::to_string(s.ell[k - 1]) + "," + std::to_string(s.r[k - 1]) + "\n";
  run.extra.push_back({"schedule.csv", std::move(csv)});
  run.extra.push_back({"schedule_density.csv", std::move(series)});

  run.report["horizon"] = sc.horizon;
  run.report["r_horizon"] = rmax;
  run.report["identities_checked_through_n"] = checked_n;
  run.report["identity_failures"] = failures;
  run.report["window"] = W;
  run.report["density"] = dens;
  json head = json::array();
  for (std::uint64_t k = 1; k <= std::min<std::uint64_t>(sc.horizon, 16); ++k) head.push_back(s.r[k - 1]);
  run.report["r_first"] = head;
  run.summary = failures.empty() ? "identities hold through 2^" + std::to_string(checked_n) : std::to_string(failures.size()) + " identity failures";
  return failures.empty() ? Outcome::Ok : Outcome::VerificationFailed;
}

}  // namespace

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Ok:
      return "ok";
    case Outcome::VerificationFailed:
      return "verification_failed";
    case Outcome::ConfigError:
      return "config_error";
    case Outcome::DepthExhausted:
      return "depth_exhausted";
  }
  return "unknown";
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"validate", "universal", "frequent", "genericity", "x", "schedule"};
  return names;
}

Outcome outcome_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation:
      return Outcome::VerificationFailed;
    case ErrorCode::DepthExhausted:
    case ErrorCode::ResourceLimit:
      return Outcome::DepthExhausted;
    case ErrorCode::InvalidArgument:
    case ErrorCode::FieldMismatch:
    case ErrorCode::ZeroInverse:
    case ErrorCode::Config:
      return Outcome::ConfigError;
  }
  return Outcome::ConfigError;
}

std::string config_hash(const RunConfig& config) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(config.canonical.data(), config.canonical.size(), md, &len, EVP_sha256(), nullptr) != 1)
    fail(ErrorCode::Config, "SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

CommandResult run_command(const std::string& command, const RunConfig& config, std::optional<std::uint64_t> seed_override) {
  Run run{config, seed_override.value_or(config.seed), json::object(), {}, {}};
  run.report["command"] = command;
  run.report["config_sha256"] = config_hash(config);
  run.report["seed"] = run.seed;
  CommandResult res;
  try {
    if (command == "validate")
      res.status = cmd_validate(run);
    else if (command == "universal")
      res.status = cmd_universal(run);
    else if (command == "frequent")
      res.status = cmd_frequent(run);
    else if (command == "genericity")
      res.status = cmd_genericity(run);
    else if (command == "x")
      res.status = cmd_x(run);
    else if (command == "schedule")
      res.status = cmd_schedule(run);
    else
      fail(ErrorCode::Config, "unknown command \"" + command + "\"");
  } catch (const Error& e) {
    res.status = outcome_for(e.code());
    run.report["error"] = e.what();
    run.summary = e.what();
  } catch (const std::bad_alloc&) {
    res.status = Outcome::DepthExhausted;
    run.report["error"] = "out of memory";
    run.summary = "out of memory";
  }
  run.report["status"] = to_string(res.status);
  res.summary = run.summary;
  res.artifacts.push_back({command + ".json", dump(run.report)});
  for (auto& a : run.extra) res.artifacts.push_back(std::move(a));
  return res;
}

}  // namespace htlab
