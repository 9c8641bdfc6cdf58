// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/harmonic.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "core/error.hpp"

namespace htlab {

namespace {

constexpr std::size_t kMaxListed = 20;

void note_violation(HarmonicCheck& c, std::string what) {
  c.ok = false;
  ++c.violation_count;
  if (c.violations.size() < kMaxListed) c.violations.push_back(std::move(what));
}

// sum_{y in S(x)} w(x,y) F(y) over the stored level below x.
Vector weighted_children(const WeightedTree& t, const ValueSpace& space, const VertexRef& x, const std::vector<Vector>& below) {
  Vector s = space.zero();
  std::uint64_t first = t.first_child(x);
  std::uint32_t c = t.child_count(x);
  for (std::uint32_t k = 0; k < c; ++k) {
    VertexRef y{x.level + 1, first + k};
    s = space.add(s, space.scale(t.w(y), below[first + k]));
  }
  return s;
}

TreeFunction prepare_base(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, std::size_t base) {
  if (f.depth() != base)
    fail(ErrorCode::InvalidArgument, "base function has depth " + std::to_string(f.depth()) + ", slots start at level " + std::to_string(base));
  TreeFunction g = materialize(t, f, base);
  check_function(t, space, g);
  auto check = is_harmonic(t, space, g);
  if (!check.ok)
    fail(ErrorCode::Validation, "base function is not harmonic (" + std::to_string(check.violation_count) + " violations, first at " +
                                    check.violations.front() + ")");
  return g;
}

void check_slots(const WeightedTree& t, const FreeSlots& slots, const SlotTargets& g) {
  if (slots.target < slots.base) fail(ErrorCode::InvalidArgument, "slot level below the base level");
  if (slots.target > t.materialized_depth())
    fail(ErrorCode::DepthExhausted, "slot level " + std::to_string(slots.target) + " is not stored");
  if (slots.beta.size() != t.level_size(slots.base))
    fail(ErrorCode::InvalidArgument, "expected one slot per level-" + std::to_string(slots.base) + " vertex");
  if (g.size() != t.level_size(slots.target))
    fail(ErrorCode::InvalidArgument, "targets cover " + std::to_string(g.size()) + " of " + std::to_string(t.level_size(slots.target)) +
                                         " level-" + std::to_string(slots.target) + " vertices");
  std::vector<char> is_slot(g.size(), 0);
  for (std::uint64_t i = 0; i < slots.beta.size(); ++i) {
    VertexRef b{slots.target, slots.beta[i]};
    if (!t.contains(b) || t.ancestor(b, slots.base) != i)
      fail(ErrorCode::InvalidArgument, "slot " + to_string(b) + " is not a descendant of " + to_string(VertexRef{slots.base, i}));
    is_slot[b.index] = 1;
  }
  if (slots.target == slots.base) return;
  for (std::uint64_t y = 0; y < g.size(); ++y) {
    if (is_slot[y] && g[y])
      fail(ErrorCode::InvalidArgument, "a target was supplied at free slot " + to_string(VertexRef{slots.target, y}));
    if (!is_slot[y] && !g[y])
      fail(ErrorCode::InvalidArgument, "missing target at " + to_string(VertexRef{slots.target, y}));
  }
}

// Solves F(y) from F(x) = sum w F(children) with y the only unknown child.
Vector solve_child(const WeightedTree& t, const ValueSpace& space, const VertexRef& x, const Vector& fx, const VertexRef& y,
                   const std::vector<std::optional<Vector>>& below) {
  Vector rest = space.zero();
  std::uint64_t first = t.first_child(x);
  std::uint32_t c = t.child_count(x);
  for (std::uint32_t k = 0; k < c; ++k) {
    if (first + k == y.index) continue;
    rest = space.add(rest, space.scale(t.w({x.level + 1, first + k}), *below[first + k]));
  }
  return space.scale(t.w(y).inv(), space.sub(fx, rest));
}

std::vector<Vector> unwrap(std::vector<std::optional<Vector>>&& v) {
  std::vector<Vector> out;
  out.reserve(v.size());
  for (auto& x : v) out.push_back(std::move(*x));
  return out;
}

}  // namespace

HarmonicCheck is_harmonic(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f) {
  HarmonicCheck c;
  std::size_t E = f.explicit_depth();
  for (std::size_t n = 0; n < f.depth(); ++n) {
    if (n < E) {
      const auto& here = f.level(n);
      const auto& below = f.level(n + 1);
      for (std::uint64_t i = 0; i < here.size(); ++i) {
        VertexRef x{n, i};
        if (!space.equal(here[i], weighted_children(t, space, x, below))) note_violation(c, to_string(x));
      }
      continue;
    }
    // Held tail: x and its children share the value v, so the equation
    // reads (sum w) v = v.
    const auto& held = f.level(E);
    if (const auto* rule = t.rule(n)) {
      FieldElement s = t.field().zero();
      for (const auto& w : rule->w) s = s + w;
      for (std::uint64_t i = 0; i < held.size(); ++i)
        if (!space.equal(space.scale(s, held[i]), held[i])) {
          std::string where = n <= t.materialized_depth() ? to_string(VertexRef{n, t.descendants({E, i}, n).first})
                                                          : "level " + std::to_string(n) + " below " + to_string(VertexRef{E, i});
          note_violation(c, where);
        }
      continue;
    }
    for (std::uint64_t i = 0; i < t.level_size(n); ++i) {
      VertexRef x{n, i};
      const Vector& v = held[t.ancestor(x, E)];
      if (!space.equal(space.scale(t.weight_sum(x), v), v)) note_violation(c, to_string(x));
    }
  }
  return c;
}

Real rho(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, const TreeFunction& g) {
  if (f.depth() != g.depth())
    fail(ErrorCode::InvalidArgument, "rho: functions of depth " + std::to_string(f.depth()) + " and " + std::to_string(g.depth()));
  std::size_t stored = std::max(f.explicit_depth(), g.explicit_depth());
  // Exact terms grouped by value; each group is a sum of distinct powers of
  // two, kept as a bit set scaled by 2^top.
  std::map<Rational, std::vector<std::uint64_t>> groups;
  double approx = 0.0;
  bool exact = true;
  std::uint64_t offset = 0;
  bool differs_at_last_stored = false;
  for (std::size_t n = 0; n <= f.depth(); ++n) {
    if (n > stored && !differs_at_last_stored) break;
    if (n > t.materialized_depth())
      fail(ErrorCode::DepthExhausted, "rho needs level " + std::to_string(n) + ", which is not stored");
    bool differs = false;
    std::uint64_t size = t.level_size(n);
    for (std::uint64_t i = 0; i < size; ++i) {
      VertexRef x{n, i};
      Real b = space.bounded_metric(f.value(t, x), g.value(t, x));
      if (b.is_exact()) {
        if (b.exact() == 0) continue;
        groups[b.exact()].push_back(offset + i);
      } else {
        exact = false;
        approx += std::ldexp(b.approx(), -static_cast<int>(std::min<std::uint64_t>(offset + i, 2000)));
      }
      differs = true;
    }
    if (n == stored) differs_at_last_stored = differs;
    offset += size;
  }
  Rational total(0);
  for (auto& [value, indices] : groups) {
    std::uint64_t top = *std::max_element(indices.begin(), indices.end());
    Integer bits(0);
    for (auto i : indices) mpz_setbit(bits.get_mpz_t(), top - i);
    Integer den(0);
    mpz_setbit(den.get_mpz_t(), top);
    Rational part(bits, den);
    part.canonicalize();
    total += value * part;
  }
  total.canonicalize();
  if (exact) return Real(total);
  return Real(total.get_d() + approx);
}

FreeSlots greedy_slots(const WeightedTree& t, std::size_t base, std::size_t target) {
  FreeSlots s{base, target, {}};
  std::uint64_t n = t.level_size(base);
  s.beta.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) s.beta.push_back(min_prob_descendant(t, {base, i}, target).index);
  return s;
}

Rational slot_mass(const WeightedTree& t, const FreeSlots& slots) {
  Rational m(0);
  for (auto b : slots.beta) m += t.sector_prob({slots.target, b});
  return m;
}

SlotTargets targets_off_slots(const WeightedTree& t, const FreeSlots& slots, const StepFunction& h) {
  StepFunction r = refine(t, h, slots.target);
  SlotTargets g(r.values.size());
  for (std::uint64_t i = 0; i < r.values.size(); ++i) g[i] = std::move(r.values[i]);
  for (auto b : slots.beta) g[b].reset();
  return g;
}

TreeFunction extend_lemma35(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, const FreeSlots& slots,
                            const SlotTargets& g) {
  TreeFunction F = prepare_base(t, space, f, slots.base);
  check_slots(t, slots, g);
  const std::size_t N = slots.base, K = slots.target;
  if (K == N) return F;

  // Slot paths x = p_N, ..., p_K = beta(x).
  std::vector<std::vector<char>> on_path(K + 1);
  for (std::size_t j = N; j <= K; ++j) on_path[j].assign(t.level_size(j), 0);
  for (auto b : slots.beta) {
    VertexRef v{K, b};
    while (true) {
      on_path[v.level][v.index] = 1;
      if (v.level == N) break;
      v = t.parent(v);
    }
  }

  std::vector<std::vector<std::optional<Vector>>> val(K + 1);
  val[K] = g;
  // Bottom-up over vertices whose children are all known.
  for (std::size_t j = K - 1; j > N; --j) {
    val[j].resize(t.level_size(j));
    for (std::uint64_t i = 0; i < val[j].size(); ++i) {
      if (on_path[j][i]) continue;
      VertexRef x{j, i};
      Vector s = space.zero();
      std::uint64_t first = t.first_child(x);
      for (std::uint32_t k = 0; k < t.child_count(x); ++k) s = space.add(s, space.scale(t.w({j + 1, first + k}), *val[j + 1][first + k]));
      val[j][i] = std::move(s);
    }
  }
  // Top-down along each slot path.
  const auto& base = F.level(N);
  for (std::uint64_t i = 0; i < slots.beta.size(); ++i) {
    std::vector<VertexRef> path;
    for (VertexRef v{K, slots.beta[i]}; v.level > N; v = t.parent(v)) path.push_back(v);
    std::reverse(path.begin(), path.end());
    VertexRef x{N, i};
    Vector fx = base[i];
    for (const auto& y : path) {
      Vector fy = solve_child(t, space, x, fx, y, val[y.level]);
      val[y.level][y.index] = fy;
      x = y;
      fx = std::move(fy);
    }
  }
  for (std::size_t j = N + 1; j <= K; ++j) F.push_level(unwrap(std::move(val[j])));
  return F;
}

namespace {

// Levels N+1..K for the inductive formulation.
std::vector<std::vector<std::optional<Vector>>> solve_inductive(const WeightedTree& t, const ValueSpace& space, const std::vector<Vector>& base,
                                                                const FreeSlots& slots, const SlotTargets& g) {
  const std::size_t N = slots.base, K = slots.target;
  if (K == N + 1) {
    std::vector<std::optional<Vector>> level = g;
    for (std::uint64_t i = 0; i < slots.beta.size(); ++i) {
      VertexRef y{K, slots.beta[i]};
      level[y.index] = solve_child(t, space, {N, i}, base[i], y, level);
    }
    return {std::move(level)};
  }
  // z(x): the slot path vertex one level above beta(x).
  FreeSlots up{N, K - 1, {}};
  std::vector<char> is_z(t.level_size(K - 1), 0);
  for (auto b : slots.beta) {
    std::uint64_t z = t.parent({K, b}).index;
    up.beta.push_back(z);
    is_z[z] = 1;
  }
  SlotTargets pushed(t.level_size(K - 1));
  for (std::uint64_t i = 0; i < pushed.size(); ++i) {
    if (is_z[i]) continue;
    VertexRef x{K - 1, i};
    Vector s = space.zero();
    std::uint64_t first = t.first_child(x);
    for (std::uint32_t k = 0; k < t.child_count(x); ++k) s = space.add(s, space.scale(t.w({K, first + k}), *g[first + k]));
    pushed[i] = std::move(s);
  }
  auto levels = solve_inductive(t, space, base, up, pushed);
  std::vector<std::optional<Vector>> last = g;
  const auto& above = levels.back();
  for (std::uint64_t i = 0; i < slots.beta.size(); ++i) {
    VertexRef y{K, slots.beta[i]};
    VertexRef z{K - 1, up.beta[i]};
    last[y.index] = solve_child(t, space, z, *above[z.index], y, last);
  }
  levels.push_back(std::move(last));
  return levels;
}

}  // namespace

TreeFunction extend_lemma35_inductive(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, const FreeSlots& slots,
                                      const SlotTargets& g) {
  TreeFunction F = prepare_base(t, space, f, slots.base);
  check_slots(t, slots, g);
  if (slots.target == slots.base) return F;
  auto levels = solve_inductive(t, space, F.level(slots.base), slots, g);
  for (auto& level : levels) F.push_level(unwrap(std::move(level)));
  return F;
}

std::optional<std::string> assumption2_violation(const WeightedTree& t, std::size_t from, std::size_t to) {
  const FieldElement one = t.field().one();
  for (std::size_t n = from; n < to; ++n) {
    if (const auto* rule = t.rule(n)) {
      FieldElement s = t.field().zero();
      for (const auto& w : rule->w) s = s + w;
      if (s != one) return "vertex (" + std::to_string(n) + ",0): weights sum to " + s.to_string() + ", not 1";
      continue;
    }
    for (std::uint64_t i = 0; i < t.level_size(n); ++i) {
      FieldElement s = t.weight_sum({n, i});
      if (s != one) return "vertex " + to_string(VertexRef{n, i}) + ": weights sum to " + s.to_string() + ", not 1";
    }
  }
  return std::nullopt;
}

TreeFunction extend_constant(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f, std::size_t n) {
  if (n < f.depth()) fail(ErrorCode::InvalidArgument, "constant extension to a level above the function's depth");
  if (n > t.depth()) fail(ErrorCode::DepthExhausted, "constant extension to level " + std::to_string(n) + " beyond tree depth " + std::to_string(t.depth()));
  check_function(t, space, f);
  auto check = is_harmonic(t, space, f);
  if (!check.ok) fail(ErrorCode::Validation, "function to extend is not harmonic (first violation at " + check.violations.front() + ")");
  if (auto bad = assumption2_violation(t, f.depth(), n)) fail(ErrorCode::Validation, "constant extension needs weights summing to 1; " + *bad);
  TreeFunction g = f;
  g.set_depth(n);
  return g;
}

std::vector<TreeFunction> brute_force_extensions(const WeightedTree& t, const ValueSpace& space, const TreeFunction& f,
                                                 std::size_t target, const SlotTargets& g, const Integer& cap) {
  auto e_size = space.size();
  if (!e_size) fail(ErrorCode::InvalidArgument, "brute force needs a finite value space");
  const std::size_t N = f.depth(), K = target;
  if (K < N) fail(ErrorCode::InvalidArgument, "target level above the base");
  if (K > t.materialized_depth()) fail(ErrorCode::DepthExhausted, "target level is not stored");
  TreeFunction F = materialize(t, f, N);
  check_function(t, space, F);
  if (!is_harmonic(t, space, F).ok) return {};
  if (K == N) return {F};
  if (g.size() != t.level_size(K)) fail(ErrorCode::InvalidArgument, "targets must cover level " + std::to_string(K));

  std::vector<std::vector<std::optional<Vector>>> val(K + 1);
  val[K] = g;
  for (std::size_t j = N + 1; j < K; ++j) val[j].resize(t.level_size(j));

  // Unknowns bottom-up, so a vertex is assigned after all of its children.
  std::vector<VertexRef> order;
  for (std::size_t j = K; j > N; --j)
    for (std::uint64_t i = 0; i < val[j].size(); ++i)
      if (!val[j][i]) order.push_back({j, i});
  Integer space_size;
  mpz_ui_pow_ui(space_size.get_mpz_t(), *e_size, order.size());
  if (space_size > cap)
    fail(ErrorCode::ResourceLimit, "brute force search space " + space_size.get_str() + " exceeds the cap " + cap.get_str());

  // Equations to test once position p of `order` is assigned.
  std::vector<std::vector<VertexRef>> checks(order.size());
  std::vector<VertexRef> upfront;
  std::map<std::pair<std::size_t, std::uint64_t>, std::size_t> position;
  for (std::size_t p = 0; p < order.size(); ++p) position[{order[p].level, order[p].index}] = p;
  for (std::size_t j = N; j < K; ++j)
    for (std::uint64_t i = 0; i < t.level_size(j); ++i) {
      VertexRef x{j, i};
      std::optional<std::size_t> last;
      auto self = position.find({j, i});
      if (self != position.end()) last = self->second;
      std::uint64_t first = t.first_child(x);
      for (std::uint32_t k = 0; k < t.child_count(x); ++k) {
        auto it = position.find({j + 1, first + k});
        if (it != position.end()) last = std::max(last.value_or(0), it->second);
      }
      if (last)
        checks[*last].push_back(x);
      else
        upfront.push_back(x);
    }

  const auto& base = F.level(N);
  auto value_of = [&](const VertexRef& v) -> const Vector& { return v.level == N ? base[v.index] : *val[v.level][v.index]; };
  auto holds = [&](const VertexRef& x) {
    Vector s = space.zero();
    std::uint64_t first = t.first_child(x);
    for (std::uint32_t k = 0; k < t.child_count(x); ++k) s = space.add(s, space.scale(t.w({x.level + 1, first + k}), *val[x.level + 1][first + k]));
    return space.equal(s, value_of(x));
  };
  for (const auto& x : upfront)
    if (!holds(x)) return {};

  std::vector<Vector> elements;
  for (std::uint64_t e = 0; e < *e_size; ++e) elements.push_back(space.enumerate_dense(e));

  std::vector<TreeFunction> found;
  std::vector<std::size_t> choice(order.size(), 0);
  // Iterative depth-first search with pruning on completed equations.
  std::size_t p = 0;
  while (true) {
    if (p == order.size()) {
      TreeFunction sol = F;
      for (std::size_t j = N + 1; j <= K; ++j) {
        std::vector<Vector> level;
        level.reserve(val[j].size());
        for (const auto& v : val[j]) level.push_back(*v);
        sol.push_level(std::move(level));
      }
      found.push_back(std::move(sol));
      if (p == 0) break;
      --p;
      ++choice[p];
      continue;
    }
    if (choice[p] >= elements.size()) {
      val[order[p].level][order[p].index].reset();
      choice[p] = 0;
      if (p == 0) break;
      --p;
      ++choice[p];
      continue;
    }
    val[order[p].level][order[p].index] = elements[choice[p]];
    bool ok = true;
    for (const auto& x : checks[p])
      if (!holds(x)) {
        ok = false;
        break;
      }
    if (ok)
      ++p;
    else
      ++choice[p];
  }
  return found;
}

TreeFunction harmonic_from_level(const WeightedTree& t, const ValueSpace& space, const StepFunction& h) {
  check_step(t, space, h);
  std::vector<std::vector<Vector>> levels(h.level + 1);
  levels[h.level] = h.values;
  for (std::size_t n = h.level; n-- > 0;) {
    levels[n].reserve(t.level_size(n));
    for (std::uint64_t i = 0; i < t.level_size(n); ++i) levels[n].push_back(weighted_children(t, space, {n, i}, levels[n + 1]));
  }
  return TreeFunction(h.level, std::move(levels));
}

}  // namespace htlab
