// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/frequency.hpp"

#include <algorithm>
#include <bit>
#include <map>

#include "core/error.hpp"

namespace htlab {

std::uint32_t ell(std::uint64_t k) {
  if (k == 0) fail(ErrorCode::InvalidArgument, "l(k) needs k >= 1");
  return static_cast<std::uint32_t>(std::countr_zero(k)) + 1;
}

std::uint64_t r_of(std::uint64_t k) {
  std::uint64_t sum = 0;
  for (std::uint64_t n = 1; n <= k; ++n) sum += ell(n);
  return sum;
}

std::uint64_t count_ell(unsigned n, unsigned m) {
  if (m == 0 || m > n) fail(ErrorCode::InvalidArgument, "count_ell needs 1 <= m <= n");
  if (n > 40) fail(ErrorCode::InvalidArgument, "count_ell scans 2^n values; n is limited to 40");
  std::uint64_t c = 0, top = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k <= top; ++k)
    if (ell(k) == m) ++c;
  return c;
}

Schedule make_schedule(std::uint64_t horizon) {
  Schedule s;
  s.horizon = horizon;
  s.ell.reserve(horizon);
  s.r.reserve(horizon);
  std::uint64_t sum = 0;
  for (std::uint64_t k = 1; k <= horizon; ++k) {
    std::uint32_t l = ell(k);
    sum += l;
    s.ell.push_back(l);
    s.r.push_back(sum);
  }
  return s;
}

std::vector<std::uint64_t> r_values_with_ell(const Schedule& s, std::uint32_t m, std::uint64_t W) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t i = 0; i < s.horizon && s.r[i] <= W; ++i)
    if (s.ell[i] == m) out.push_back(s.r[i]);
  return out;
}

std::vector<std::uint64_t> running_counts(const std::vector<std::uint64_t>& sorted_set, std::uint64_t W) {
  std::vector<std::uint64_t> counts(W + 1, 0);
  std::size_t p = 0;
  std::uint64_t c = 0;
  for (std::uint64_t N = 0; N <= W; ++N) {
    while (p < sorted_set.size() && sorted_set[p] <= N) {
      ++c;
      ++p;
    }
    counts[N] = c;
  }
  return counts;
}

DensityReport density(const std::vector<std::uint64_t>& sorted_set, std::uint64_t W, std::string description) {
  if (W < 2) fail(ErrorCode::InvalidArgument, "density window must be at least 2");
  if (!std::is_sorted(sorted_set.begin(), sorted_set.end())) fail(ErrorCode::InvalidArgument, "density needs a sorted index set");
  DensityReport d;
  d.set = std::move(description);
  d.window = W;
  auto counts = running_counts(sorted_set, W);
  d.hits = counts[W];
  // Ratios are compared by cross multiplication to stay exact.
  std::uint64_t lo_num = 1, lo_den = 1, hi_num = 0, hi_den = 1;
  for (std::uint64_t N = (W + 1) / 2; N <= W; ++N) {
    std::uint64_t num = counts[N], den = N + 1;
    using u128 = unsigned __int128;
    if (static_cast<u128>(num) * lo_den < static_cast<u128>(lo_num) * den || N == (W + 1) / 2) {
      lo_num = num;
      lo_den = den;
      d.lower_at = N;
    }
    if (static_cast<u128>(num) * hi_den > static_cast<u128>(hi_num) * den || N == (W + 1) / 2) {
      hi_num = num;
      hi_den = den;
      d.upper_at = N;
    }
  }
  d.lower = Rational(Integer(static_cast<unsigned long>(lo_num)), Integer(static_cast<unsigned long>(lo_den)));
  d.upper = Rational(Integer(static_cast<unsigned long>(hi_num)), Integer(static_cast<unsigned long>(hi_den)));
  d.lower.canonicalize();
  d.upper.canonicalize();
  return d;
}

Lemma43Result extend_lemma43(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, std::size_t n, const StepFunction& h) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "the gap n must be positive");
  std::size_t s = phi.depth();
  if (s + n > t.depth()) fail(ErrorCode::DepthExhausted, "level " + std::to_string(s + n) + " exceeds tree depth " + std::to_string(t.depth()));
  StageHit hit = hit_target(t, space, materialize(t, phi, s), s + n, h);
  Lemma43Result r;
  r.achieved = dP(t, space, omega(hit.F, s + n), h);
  r.F = std::move(hit.F);
  r.slot_mass = hit.slot_mass;
  return r;
}

std::vector<std::uint64_t> expected_hit_indices(std::uint64_t first, std::uint64_t last, std::uint32_t m) {
  std::vector<std::uint64_t> out;
  std::uint64_t r = r_of(first == 0 ? 0 : first - 1);
  for (std::uint64_t k = std::max<std::uint64_t>(first, 1); k <= last; ++k) {
    r += ell(k);
    if (ell(k) == m) out.push_back(r);
  }
  return out;
}

namespace {

StepFunction target_for(const WeightedTree& t, const ValueSpace& space, const FrequentOptions& opt, std::uint32_t m, std::string& name) {
  if (m <= opt.targets.size()) {
    name = m <= opt.target_names.size() ? opt.target_names[m - 1] : "target:" + std::to_string(m);
    return opt.targets[m - 1];
  }
  name = "dense:" + std::to_string(m - 1);
  return dense_target(t, space, m - 1);
}

}  // namespace

FrequentResult build_frequent(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, const FrequentOptions& opt) {
  FrequentResult res;
  check_function(t, space, phi);
  auto hc = is_harmonic(t, space, phi);
  if (!hc.ok) fail(ErrorCode::Validation, "seed function is not harmonic (first violation at " + hc.violations.front() + ")");
  TreeFunction F = materialize(t, phi, phi.depth());
  const std::size_t N = F.depth();
  const std::size_t top = std::min(t.depth(), t.materialized_depth());

  std::uint64_t k = 1, s = 0;
  while (s < N) s += ell(k++);
  res.first_stage = k;
  res.padded_to = s;
  if (s > N) {
    if (s > top) {
      res.message = "padding to r_" + std::to_string(k - 1) + " = " + std::to_string(s) + " exceeds the usable depth " + std::to_string(top);
      res.F = F;
      return res;
    }
    F = hit_target(t, space, F, s, constant_step(space.zero())).F;
  }
  for (; k <= opt.horizon; ++k) {
    std::uint32_t l = ell(k);
    std::size_t level = s + l;
    if (level > top) {
      res.message = "stage k = " + std::to_string(k) + " needs level r_k = " + std::to_string(level) + " beyond the usable depth " + std::to_string(top);
      break;
    }
    std::string name;
    StepFunction h = target_for(t, space, opt, l, name);
    if (h.level > level) {
      res.message = "target " + name + " is measurable only at level " + std::to_string(h.level) + ", after r_k = " + std::to_string(level);
      break;
    }
    Lemma43Result step = extend_lemma43(t, space, F, l, h);
    F = std::move(step.F);
    FrequentHit hit;
    hit.k = k;
    hit.index = level;
    hit.level = level;
    hit.ell = l;
    hit.target = name;
    hit.achieved = step.achieved;
    hit.bound = pow2_neg(l);
    hit.slot_mass = step.slot_mass;
    res.hits.push_back(std::move(hit));
    res.hit_targets.push_back(std::move(h));
    s = level;
  }
  res.complete = res.message.empty();
  res.F = fill_to_depth(t, space, F);
  return res;
}

FrequentResult build_frequent_tau(const WeightedTree& t, const ValueSpace& space, const std::vector<std::size_t>& tau, const TreeFunction& phi,
                                  const FrequentOptions& opt) {
  auto pos = std::find(tau.begin(), tau.end(), phi.depth());
  if (pos == tau.end()) fail(ErrorCode::InvalidArgument, "seed depth " + std::to_string(phi.depth()) + " is not in the level set");
  WeightedTree tc = collapse(t, tau);
  TreeFunction full = materialize(t, phi, phi.depth());
  std::size_t idx = static_cast<std::size_t>(pos - tau.begin());
  std::vector<std::vector<Vector>> levels;
  for (std::size_t i = 0; i <= idx; ++i) levels.push_back(full.level(tau[i]));
  TreeFunction phi_c(idx, std::move(levels));

  FrequentOptions copt = opt;
  for (auto& h : copt.targets) {
    auto it = std::find(tau.begin(), tau.end(), h.level);
    if (it == tau.end()) fail(ErrorCode::InvalidArgument, "target level " + std::to_string(h.level) + " is not in the level set");
    h.level = static_cast<std::size_t>(it - tau.begin());
  }
  FrequentResult rc = build_frequent(tc, space, phi_c, copt);
  TreeFunction fc = materialize(tc, rc.F, tc.depth());

  // Pull back one level pair at a time.
  TreeFunction F = full;
  for (std::size_t i = idx; i + 1 < tau.size(); ++i) {
    FreeSlots slots = greedy_slots(t, tau[i], tau[i + 1]);
    SlotTargets g(fc.level(i + 1).begin(), fc.level(i + 1).end());
    for (auto b : slots.beta) g[b].reset();
    F = extend_lemma35(t, space, F, slots, g);
    for (auto b : slots.beta)
      if (!space.equal(F.level(tau[i + 1])[b], fc.level(i + 1)[b]))
        fail(ErrorCode::Validation, "pullback disagrees with the collapsed solution at " + to_string(VertexRef{tau[i + 1], b}));
  }

  FrequentResult res;
  res.tau = tau;
  res.first_stage = rc.first_stage;
  res.padded_to = tau[rc.padded_to];
  res.complete = rc.complete;
  res.message = rc.message;
  for (std::size_t i = 0; i < rc.hits.size(); ++i) {
    FrequentHit hit = rc.hits[i];
    hit.level = tau[hit.index];
    StepFunction h = rc.hit_targets[i];
    h.level = tau[h.level];
    // Sector masses agree on both trees, so the distance carries over.
    hit.achieved = dP(t, space, omega(F, hit.level), h);
    res.hits.push_back(std::move(hit));
    res.hit_targets.push_back(std::move(h));
  }
  res.F = fill_to_depth(t, space, F);
  return res;
}

std::vector<std::string> verify_frequent(const WeightedTree& t, const ValueSpace& space, const FrequentResult& r) {
  std::vector<std::string> bad;
  for (std::size_t i = 0; i < r.hits.size(); ++i) {
    const auto& h = r.hits[i];
    Real again = dP(t, space, omega(r.F, h.level), r.hit_targets[i]);
    std::string tag = "k = " + std::to_string(h.k) + " (level " + std::to_string(h.level) + ")";
    if (!(again == h.achieved)) bad.push_back(tag + ": recomputed " + again.to_string() + " != " + h.achieved.to_string());
    if (!(again < Real(h.bound))) bad.push_back(tag + ": " + again.to_string() + " is not below " + to_string(h.bound));
  }
  if (!r.hits.empty()) {
    std::uint32_t max_ell = 0;
    for (const auto& h : r.hits) max_ell = std::max(max_ell, h.ell);
    std::uint64_t last = r.hits.back().k;
    for (std::uint32_t m = 1; m <= max_ell; ++m) {
      std::vector<std::uint64_t> got;
      for (const auto& h : r.hits)
        if (h.ell == m) got.push_back(h.index);
      if (got != expected_hit_indices(r.first_stage, last, m)) bad.push_back("hit set for target " + std::to_string(m) + " differs from the schedule");
    }
  }
  auto hc = is_harmonic(t, space, r.F);
  if (!hc.ok) bad.push_back("F is not harmonic (first violation at " + hc.violations.front() + ")");
  return bad;
}

XResult build_X(const WeightedTree& t, const ValueSpace& space, const TreeFunction& phi, const XOptions& opt) {
  if (opt.balls.empty()) fail(ErrorCode::InvalidArgument, "at least one ball is needed");
  if (opt.hold_ratio <= 0 || opt.hold_ratio >= 1) fail(ErrorCode::InvalidArgument, "hold ratio must lie in (0,1)");
  for (const auto& b : opt.balls) {
    if (b.radius <= 0) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
    check_step(t, space, b.center);
  }
  const std::size_t D = t.depth();
  if (auto bad = assumption2_violation(t, 0, D)) fail(ErrorCode::Validation, "holding a projection needs weights summing to 1; " + *bad);
  check_function(t, space, phi);
  auto hc = is_harmonic(t, space, phi);
  if (!hc.ok) fail(ErrorCode::Validation, "seed function is not harmonic (first violation at " + hc.violations.front() + ")");

  XResult res;
  TreeFunction F = phi;
  std::size_t front = F.depth();
  const std::size_t B = opt.balls.size();
  std::optional<std::size_t> last_ball;
  bool stop = false;
  for (std::size_t round = 1; !stop; ++round) {
    for (std::size_t b = 0; b < std::min(round, B) && !stop; ++b) {
      if (B > 1 && last_ball && *last_ball == b) continue;
      const Ball& ball = opt.balls[b];
      std::size_t n = 1;
      while (pow2_neg(static_cast<unsigned>(n)) > ball.radius / 2) ++n;
      n = std::max(n, ball.center.level > front ? ball.center.level - front : std::size_t{0});
      std::size_t H = front + n;
      Rational need = std::max<Rational>(Rational(1) - Rational(1, static_cast<unsigned long>(round)), opt.hold_ratio);
      // Smallest k with k / (H + k) >= need.
      Rational kq = need * static_cast<unsigned long>(H) / (Rational(1) - need);
      Integer k = kq.get_num() / kq.get_den();
      if (Rational(k) < kq) ++k;
      if (H > t.materialized_depth() || Integer(static_cast<unsigned long>(H)) + k > D) {
        stop = true;
        break;
      }
      std::size_t hold = k.get_ui();
      TreeFunction base = materialize(t, F, front);
      base.truncate(front);
      StageHit hit = hit_target(t, space, base, H, ball.center);
      XVisit v;
      v.ball = b;
      v.round = round;
      v.front = front;
      v.gap = n;
      v.hit_level = H;
      v.achieved = dP(t, space, omega(hit.F, H), ball.center);
      v.hold_end = H + hold;
      F = extend_constant(t, space, hit.F, H + hold);
      res.visits.push_back(std::move(v));
      front = H + hold;
      last_ball = b;
    }
  }
  if (res.visits.empty()) res.message = "depth " + std::to_string(D) + " leaves no room for a single hit and hold";
  F = extend_constant(t, space, F, D);
  if (!res.visits.empty()) res.visits.back().hold_end = D;

  // Distances to each centre, one per stored level of F; deeper levels
  // repeat the last stored slice.
  std::vector<std::vector<Real>> dist(B);
  for (std::size_t b = 0; b < B; ++b)
    for (std::size_t n = 0; n <= F.explicit_depth(); ++n) dist[b].push_back(dP(t, space, omega(F, n), opt.balls[b].center));
  auto distance = [&](std::size_t b, std::size_t n) -> const Real& { return dist[b][std::min(n, F.explicit_depth())]; };

  for (auto& v : res.visits) {
    bool ok = true;
    const Real& first = distance(v.ball, v.hit_level);
    for (std::size_t n = v.hit_level; n <= v.hold_end; ++n)
      if (!(distance(v.ball, n) == first) || !(distance(v.ball, n) < Real(opt.balls[v.ball].radius))) ok = false;
    v.hold_verified = ok && first == v.achieved;
  }
  res.balls.resize(B);
  for (std::size_t b = 0; b < B; ++b) {
    auto& rep = res.balls[b];
    for (std::size_t n = 0; n <= D; ++n)
      if (distance(b, n) < Real(opt.balls[b].radius)) rep.members.push_back(n);
    rep.window = D;
    for (const auto& v : res.visits)
      if (v.ball == b) rep.window = v.hold_end;
    std::string name = b < opt.names.size() ? opt.names[b] : "ball:" + std::to_string(b + 1);
    rep.density = density(rep.members, std::max<std::size_t>(rep.window, 2), name);
  }
  res.F = std::move(F);
  return res;
}

}  // namespace htlab
