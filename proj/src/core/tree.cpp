// Copyright 2026 The htlab Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/tree.hpp"

#include <cstdlib>
#include <limits>
#include <map>
#include <unordered_map>

#include "core/error.hpp"

namespace htlab {

std::string to_string(const VertexRef& v) {
  return "(" + std::to_string(v.level) + "," + std::to_string(v.index) + ")";
}

bool TreeConfig::rule_generated() const {
  return !std::holds_alternative<ExplicitChildren>(branching) && !std::holds_alternative<PerEdge<Rational>>(q) &&
         !std::holds_alternative<PerEdge<FieldElement>>(w);
}

TreeConfig TreeConfig::uniform(std::size_t depth, std::uint32_t branching, FieldSpec field) {
  TreeConfig c;
  c.depth = depth;
  c.field = field;
  c.branching = branching;
  return c;
}

std::uint64_t default_max_vertices() {
  if (const char* env = std::getenv("HTLAB_MAX_VERTICES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return std::uint64_t{1} << 21;
}

// Builds the flat arrays and interns edge data. Rationals and weights are
// pooled because rule-generated trees repeat the same handful of values
// across millions of edges.
class TreeAssembler {
 public:
  TreeAssembler(std::size_t depth, FieldSpec field) {
    tree_.depth_ = depth;
    tree_.field_ = field;
    tree_.parent_.push_back(std::numeric_limits<std::uint32_t>::max());
    tree_.q_idx_.push_back(std::numeric_limits<std::uint32_t>::max());
    tree_.w_idx_.push_back(std::numeric_limits<std::uint32_t>::max());
    tree_.sector_idx_.push_back(intern(Rational(1)));
  }

  std::uint32_t intern(const Rational& q) {
    auto [it, inserted] = rational_ids_.try_emplace(q, static_cast<std::uint32_t>(tree_.rationals_.size()));
    if (inserted) tree_.rationals_.push_back(q);
    return it->second;
  }

  std::uint32_t intern(const FieldElement& w) {
    auto [it, inserted] = weight_ids_.try_emplace(w, static_cast<std::uint32_t>(tree_.weights_.size()));
    if (inserted) tree_.weights_.push_back(w);
    return it->second;
  }

  std::uint32_t sector_product(std::uint32_t parent_sector, std::uint32_t q_id) {
    std::uint64_t key = (std::uint64_t{parent_sector} << 32) | q_id;
    auto it = sector_memo_.find(key);
    if (it != sector_memo_.end()) return it->second;
    std::uint32_t id = intern(Rational(tree_.rationals_[parent_sector] * tree_.rationals_[q_id]));
    sector_memo_.emplace(key, id);
    return id;
  }

  // Vertices of the current last level receive children in order; end_level
  // closes the new level.
  void add_children(std::size_t parent_id, const std::vector<std::uint32_t>& q_ids, const std::vector<std::uint32_t>& w_ids) {
    tree_.first_child_.resize(tree_.parent_.size(), 0);
    tree_.child_count_.resize(tree_.parent_.size(), 0);
    tree_.first_child_[parent_id] = static_cast<std::uint32_t>(tree_.parent_.size());
    tree_.child_count_[parent_id] = static_cast<std::uint32_t>(q_ids.size());
    for (std::size_t i = 0; i < q_ids.size(); ++i) {
      tree_.parent_.push_back(static_cast<std::uint32_t>(parent_id));
      tree_.q_idx_.push_back(q_ids[i]);
      tree_.w_idx_.push_back(w_ids[i]);
      tree_.sector_idx_.push_back(sector_product(tree_.sector_idx_[parent_id], q_ids[i]));
    }
  }

  void end_level() { tree_.level_offset_.push_back(tree_.parent_.size()); }

  void set_rules(std::vector<WeightedTree::LevelRule> rules) { tree_.rules_ = std::move(rules); }

  WeightedTree finish() {
    tree_.first_child_.resize(tree_.parent_.size(), 0);
    tree_.child_count_.resize(tree_.parent_.size(), 0);
    return std::move(tree_);
  }

 private:
  struct WeightLess {
    bool operator()(const FieldElement& a, const FieldElement& b) const { return a.less(b); }
  };

  WeightedTree tree_;
  std::map<Rational, std::uint32_t> rational_ids_;
  std::map<FieldElement, std::uint32_t, WeightLess> weight_ids_;
  std::unordered_map<std::uint64_t, std::uint32_t> sector_memo_;
};

namespace {

constexpr std::size_t kMaxIssues = 50;

struct IssueLog {
  std::vector<std::string> items;
  std::size_t dropped = 0;
  void add(std::string s) {
    if (items.size() < kMaxIssues)
      items.push_back(std::move(s));
    else
      ++dropped;
  }
  std::vector<std::string> finish() {
    if (dropped > 0) items.push_back("... and " + std::to_string(dropped) + " more");
    return std::move(items);
  }
};

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) return std::numeric_limits<std::uint64_t>::max();
  return a * b;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s < a ? std::numeric_limits<std::uint64_t>::max() : s;
}

std::string edge_name(std::size_t level, std::uint64_t parent_index, std::uint32_t child) {
  return "edge (" + std::to_string(level) + "," + std::to_string(parent_index) + ")->child " + std::to_string(child);
}

void check_edge(IssueLog& log, const std::string& where, const Rational& q, const FieldElement& w) {
  if (q <= 0 || q > 1) log.add(where + ": q = " + to_string(q) + " is not in (0,1]");
  if (w.is_zero()) log.add(where + ": zero weight w");
}

// Rule describing one level of a rule-generated config, with per-child
// values resolved. Returns nullopt after logging when the rule is invalid.
std::optional<WeightedTree::LevelRule> resolve_rule(const TreeConfig& cfg, std::size_t level, std::uint32_t branching, IssueLog& log) {
  WeightedTree::LevelRule rule;
  rule.branching = branching;
  std::string where = "vertex (" + std::to_string(level) + ",*)";
  bool ok = true;
  if (branching < 2) {
    log.add(where + ": " + std::to_string(branching) + " children, at least two required");
    return std::nullopt;
  }
  if (std::holds_alternative<TreeConfig::Uniform>(cfg.q)) {
    rule.q.assign(branching, Rational(1, branching));
  } else {
    const auto& v = std::get<TreeConfig::PerChild<Rational>>(cfg.q).values;
    if (v.size() != branching) {
      log.add(where + ": q lists " + std::to_string(v.size()) + " values for " + std::to_string(branching) + " children");
      return std::nullopt;
    }
    rule.q = v;
  }
  for (std::uint32_t i = 0; i < branching; ++i) {
    if (std::holds_alternative<TreeConfig::Ones>(cfg.w)) {
      rule.w.push_back(cfg.field.one());
    } else if (std::holds_alternative<TreeConfig::FromQ>(cfg.w)) {
      try {
        rule.w.push_back(cfg.field.from_rational(rule.q[i]));
      } catch (const Error& e) {
        log.add(edge_name(level, 0, i) + ": w = q is undefined in " + cfg.field.name() + " (" + e.what() + ")");
        ok = false;
        rule.w.push_back(cfg.field.one());
      }
    } else {
      const auto& v = std::get<TreeConfig::PerChild<FieldElement>>(cfg.w).values;
      if (v.size() != branching) {
        log.add(where + ": w lists " + std::to_string(v.size()) + " values for " + std::to_string(branching) + " children");
        return std::nullopt;
      }
      rule.w.push_back(v[i]);
    }
  }
  Rational sum(0);
  for (std::uint32_t i = 0; i < branching; ++i) {
    if (rule.q[i] <= 0 || rule.q[i] > 1) {
      log.add("edge (" + std::to_string(level) + ",*)->child " + std::to_string(i) + ": q = " + to_string(rule.q[i]) + " is not in (0,1]");
      ok = false;
    }
    if (rule.w[i].is_zero()) {
      log.add("edge (" + std::to_string(level) + ",*)->child " + std::to_string(i) + ": zero weight w");
      ok = false;
    }
    sum += rule.q[i];
  }
  if (sum != 1) {
    log.add("vertex (" + std::to_string(level) + ",0) (and every level-" + std::to_string(level) + " vertex): q row sums to " + to_string(sum) +
            ", expected 1");
    ok = false;
  }
  if (!ok) return std::nullopt;
  return rule;
}

TreeBuildOutcome build_rule_generated(const TreeConfig& cfg, std::uint64_t cap) {
  IssueLog log;
  std::vector<std::uint32_t> branching(cfg.depth);
  if (auto* b = std::get_if<std::uint32_t>(&cfg.branching)) {
    branching.assign(cfg.depth, *b);
  } else {
    const auto& list = std::get<std::vector<std::uint32_t>>(cfg.branching);
    if (list.size() != cfg.depth) {
      log.add("branching list has " + std::to_string(list.size()) + " entries for depth " + std::to_string(cfg.depth));
      return {std::nullopt, log.finish()};
    }
    branching = list;
  }

  std::vector<WeightedTree::LevelRule> rules;
  bool ok = true;
  for (std::size_t n = 0; n < cfg.depth; ++n) {
    auto rule = resolve_rule(cfg, n, branching[n], log);
    if (!rule) {
      ok = false;
      rules.emplace_back();
    } else {
      rules.push_back(std::move(*rule));
    }
  }
  if (!ok) return {std::nullopt, log.finish()};

  // Store levels while the running vertex total stays within the cap.
  std::size_t stored = 0;
  std::uint64_t level_size = 1, total = 1;
  std::size_t ceiling = cfg.materialize.value_or(cfg.depth);
  while (stored < cfg.depth && stored < ceiling) {
    std::uint64_t next = saturating_mul(level_size, branching[stored]);
    std::uint64_t next_total = saturating_add(total, next);
    if (next_total > cap || next_total > std::numeric_limits<std::uint32_t>::max()) break;
    level_size = next;
    total = next_total;
    ++stored;
  }

  TreeAssembler as(cfg.depth, cfg.field);
  std::vector<std::vector<std::uint32_t>> q_ids(cfg.depth), w_ids(cfg.depth);
  for (std::size_t n = 0; n < stored; ++n)
    for (std::uint32_t i = 0; i < rules[n].branching; ++i) {
      q_ids[n].push_back(as.intern(rules[n].q[i]));
      w_ids[n].push_back(as.intern(rules[n].w[i]));
    }
  std::uint64_t begin = 0, end = 1;
  for (std::size_t n = 0; n < stored; ++n) {
    for (std::uint64_t id = begin; id < end; ++id) as.add_children(id, q_ids[n], w_ids[n]);
    as.end_level();
    std::uint64_t next = end + (end - begin) * rules[n].branching;
    begin = end;
    end = next;
  }
  as.set_rules(std::move(rules));
  return {as.finish(), {}};
}

TreeBuildOutcome build_explicit(const TreeConfig& cfg, std::uint64_t cap) {
  IssueLog log;
  // Resolve the per-vertex child counts level by level.
  std::vector<std::vector<std::uint32_t>> counts(cfg.depth);
  std::uint64_t level_size = 1, total = 1;
  if (auto* explicit_children = std::get_if<TreeConfig::ExplicitChildren>(&cfg.branching)) {
    std::size_t pos = 0;
    const auto& all = explicit_children->counts;
    for (std::size_t n = 0; n < cfg.depth; ++n) {
      if (all.size() - pos < level_size) {
        log.add("explicit children list ends inside level " + std::to_string(n) + " (" + std::to_string(all.size()) + " entries)");
        return {std::nullopt, log.finish()};
      }
      counts[n].assign(all.begin() + static_cast<std::ptrdiff_t>(pos), all.begin() + static_cast<std::ptrdiff_t>(pos + level_size));
      pos += level_size;
      std::uint64_t next = 0;
      for (auto c : counts[n]) next = saturating_add(next, c);
      level_size = next;
      total = saturating_add(total, next);
      if (total > cap) fail(ErrorCode::ResourceLimit, "tree exceeds the vertex cap of " + std::to_string(cap));
    }
    if (pos != all.size())
      log.add("explicit children list has " + std::to_string(all.size() - pos) + " entries beyond the internal vertices of a depth-" +
              std::to_string(cfg.depth) + " tree");
  } else {
    std::vector<std::uint32_t> per_level(cfg.depth);
    if (auto* b = std::get_if<std::uint32_t>(&cfg.branching)) {
      per_level.assign(cfg.depth, *b);
    } else {
      per_level = std::get<std::vector<std::uint32_t>>(cfg.branching);
      if (per_level.size() != cfg.depth) {
        log.add("branching list has " + std::to_string(per_level.size()) + " entries for depth " + std::to_string(cfg.depth));
        return {std::nullopt, log.finish()};
      }
    }
    for (std::size_t n = 0; n < cfg.depth; ++n) {
      counts[n].assign(level_size, per_level[n]);
      level_size = saturating_mul(level_size, per_level[n]);
      total = saturating_add(total, level_size);
      if (total > cap) fail(ErrorCode::ResourceLimit, "tree exceeds the vertex cap of " + std::to_string(cap));
    }
  }
  if (total > std::numeric_limits<std::uint32_t>::max()) fail(ErrorCode::ResourceLimit, "tree exceeds 2^32 vertices");

  std::uint64_t edges = total - 1;
  if (auto* pe = std::get_if<TreeConfig::PerEdge<Rational>>(&cfg.q); pe && pe->values.size() != edges)
    log.add("q lists " + std::to_string(pe->values.size()) + " values for " + std::to_string(edges) + " edges");
  if (auto* pe = std::get_if<TreeConfig::PerEdge<FieldElement>>(&cfg.w); pe && pe->values.size() != edges)
    log.add("w lists " + std::to_string(pe->values.size()) + " values for " + std::to_string(edges) + " edges");
  if (!log.items.empty()) return {std::nullopt, log.finish()};

  TreeAssembler as(cfg.depth, cfg.field);
  std::uint64_t edge = 0;
  bool ok = true;
  std::vector<std::uint32_t> q_ids, w_ids;
  std::uint64_t level_begin = 0;
  for (std::size_t n = 0; n < cfg.depth; ++n) {
    for (std::uint64_t i = 0; i < counts[n].size(); ++i) {
      std::uint32_t c = counts[n][i];
      std::string vname = "vertex (" + std::to_string(n) + "," + std::to_string(i) + ")";
      if (c < 2) {
        log.add(vname + ": " + std::to_string(c) + " children, at least two required");
        ok = false;
      }
      q_ids.clear();
      w_ids.clear();
      Rational sum(0);
      for (std::uint32_t k = 0; k < c; ++k, ++edge) {
        Rational q;
        if (std::holds_alternative<TreeConfig::Uniform>(cfg.q)) {
          q = Rational(1, c);
        } else if (auto* pc = std::get_if<TreeConfig::PerChild<Rational>>(&cfg.q)) {
          if (k >= pc->values.size()) {
            log.add(vname + ": q lists " + std::to_string(pc->values.size()) + " values for " + std::to_string(c) + " children");
            ok = false;
            q = Rational(1, c);
          } else {
            q = pc->values[k];
          }
        } else {
          q = std::get<TreeConfig::PerEdge<Rational>>(cfg.q).values[edge];
        }
        FieldElement w = cfg.field.one();
        if (std::holds_alternative<TreeConfig::FromQ>(cfg.w)) {
          try {
            w = cfg.field.from_rational(q);
          } catch (const Error& e) {
            log.add(edge_name(n, i, k) + ": w = q is undefined in " + cfg.field.name());
            ok = false;
          }
        } else if (auto* pc = std::get_if<TreeConfig::PerChild<FieldElement>>(&cfg.w)) {
          if (k >= pc->values.size()) {
            log.add(vname + ": w lists " + std::to_string(pc->values.size()) + " values for " + std::to_string(c) + " children");
            ok = false;
          } else {
            w = pc->values[k];
          }
        } else if (auto* pe = std::get_if<TreeConfig::PerEdge<FieldElement>>(&cfg.w)) {
          w = pe->values[edge];
        }
        if (!(w.field() == cfg.field)) {
          log.add(edge_name(n, i, k) + ": weight belongs to " + w.field().name() + ", tree field is " + cfg.field.name());
          ok = false;
          w = cfg.field.one();
        }
        std::size_t before = log.items.size() + log.dropped;
        check_edge(log, edge_name(n, i, k), q, w);
        if (log.items.size() + log.dropped != before) ok = false;
        sum += q;
        q_ids.push_back(as.intern(q));
        w_ids.push_back(as.intern(w));
      }
      if (c >= 1 && sum != 1) {
        log.add(vname + ": q row sums to " + to_string(sum) + ", expected 1");
        ok = false;
      }
      as.add_children(level_begin + i, q_ids, w_ids);
    }
    as.end_level();
    level_begin += counts[n].size();
  }
  if (!ok) return {std::nullopt, log.finish()};
  return {as.finish(), {}};
}

}  // namespace

TreeBuildOutcome try_build_tree(const TreeConfig& config) {
  std::uint64_t cap = config.max_vertices.value_or(default_max_vertices());
  if (config.rule_generated()) return build_rule_generated(config, cap);
  return build_explicit(config, cap);
}

WeightedTree build_tree(const TreeConfig& config) {
  auto outcome = try_build_tree(config);
  if (!outcome.tree) {
    std::string msg = "invalid tree:";
    for (const auto& issue : outcome.issues) msg += "\n  " + issue;
    fail(ErrorCode::Validation, msg);
  }
  return std::move(*outcome.tree);
}

std::uint64_t WeightedTree::level_size(std::size_t n) const {
  if (n > materialized_depth()) fail(ErrorCode::DepthExhausted, "level " + std::to_string(n) + " is not stored (stored through " + std::to_string(materialized_depth()) + ")");
  return level_offset_[n + 1] - level_offset_[n];
}

bool WeightedTree::contains(const VertexRef& v) const {
  return v.level <= materialized_depth() && v.index < level_offset_[v.level + 1] - level_offset_[v.level];
}

void WeightedTree::require(const VertexRef& v) const {
  if (v.level > materialized_depth())
    fail(ErrorCode::DepthExhausted, "vertex " + to_string(v) + " lies below the stored levels (through " + std::to_string(materialized_depth()) + ")");
  if (!contains(v)) fail(ErrorCode::InvalidArgument, "vertex " + to_string(v) + " is not in the tree");
}

std::size_t WeightedTree::id(const VertexRef& v) const {
  require(v);
  return static_cast<std::size_t>(level_offset_[v.level] + v.index);
}

std::uint32_t WeightedTree::child_count(const VertexRef& x) const {
  if (x.level >= depth_) return 0;
  if (x.level >= materialized_depth()) {
    require(x);
    return rules_[x.level].branching;
  }
  return child_count_[id(x)];
}

std::uint64_t WeightedTree::first_child(const VertexRef& x) const {
  if (x.level >= materialized_depth()) fail(ErrorCode::DepthExhausted, "children of " + to_string(x) + " are not stored");
  return first_child_[id(x)] - level_offset_[x.level + 1];
}

VertexRef WeightedTree::child(const VertexRef& x, std::uint32_t i) const {
  if (i >= child_count(x)) fail(ErrorCode::InvalidArgument, "vertex " + to_string(x) + " has no child " + std::to_string(i));
  return {x.level + 1, first_child(x) + i};
}

VertexRef WeightedTree::parent(const VertexRef& y) const {
  if (y.level == 0) fail(ErrorCode::InvalidArgument, "the root has no parent");
  return {y.level - 1, parent_[id(y)] - level_offset_[y.level - 1]};
}

std::uint64_t WeightedTree::ancestor(const VertexRef& y, std::size_t level) const {
  if (level > y.level) fail(ErrorCode::InvalidArgument, "ancestor level " + std::to_string(level) + " is below " + to_string(y));
  std::size_t g = id(y);
  for (std::size_t n = y.level; n > level; --n) g = parent_[g];
  return g - level_offset_[level];
}

std::pair<std::uint64_t, std::uint64_t> WeightedTree::descendants(const VertexRef& x, std::size_t level) const {
  if (level < x.level) fail(ErrorCode::InvalidArgument, "descendant level " + std::to_string(level) + " is above " + to_string(x));
  require({level, 0});
  std::size_t lo = id(x), hi = lo + 1;
  for (std::size_t n = x.level; n < level; ++n) {
    std::size_t last = hi - 1;
    hi = first_child_[last] + child_count_[last];
    lo = first_child_[lo];
  }
  return {lo - level_offset_[level], hi - level_offset_[level]};
}

const Rational& WeightedTree::q(const VertexRef& y) const {
  if (y.level == 0) fail(ErrorCode::InvalidArgument, "the root has no incoming edge");
  return rationals_[q_idx_[id(y)]];
}

const FieldElement& WeightedTree::w(const VertexRef& y) const {
  if (y.level == 0) fail(ErrorCode::InvalidArgument, "the root has no incoming edge");
  return weights_[w_idx_[id(y)]];
}

FieldElement WeightedTree::weight_sum(const VertexRef& x) const {
  FieldElement s = field_.zero();
  if (x.level >= materialized_depth()) {
    require(x);
    if (x.level >= depth_) return s;
    for (const auto& w : rules_[x.level].w) s = s + w;
    return s;
  }
  std::size_t g = id(x);
  for (std::uint32_t i = 0; i < child_count_[g]; ++i) s = s + weights_[w_idx_[first_child_[g] + i]];
  return s;
}

const Rational& WeightedTree::sector_prob(const VertexRef& x) const { return rationals_[sector_idx_[id(x)]]; }

const WeightedTree::LevelRule* WeightedTree::rule(std::size_t level) const {
  if (level >= rules_.size()) return nullptr;
  return &rules_[level];
}

VertexRef min_prob_descendant(const WeightedTree& t, const VertexRef& x, std::size_t target_level) {
  if (target_level < x.level || target_level > t.materialized_depth())
    fail(t.depth() >= target_level && target_level >= x.level ? ErrorCode::DepthExhausted : ErrorCode::InvalidArgument,
         "target level " + std::to_string(target_level) + " out of range for " + to_string(x));
  if (!t.contains(x)) fail(ErrorCode::InvalidArgument, "vertex " + to_string(x) + " is not in the tree");
  VertexRef v = x;
  while (v.level < target_level) {
    std::uint32_t n = t.child_count(v);
    VertexRef best = t.child(v, 0);
    for (std::uint32_t i = 1; i < n; ++i) {
      VertexRef c = t.child(v, i);
      if (t.q(c) < t.q(best)) best = c;
    }
    v = best;
  }
  return v;
}

WeightedTree collapse(const WeightedTree& t, const std::vector<std::size_t>& tau) {
  if (tau.empty()) fail(ErrorCode::InvalidArgument, "collapse: empty level set");
  if (tau.front() != 0) fail(ErrorCode::InvalidArgument, "collapse: level set must start at 0");
  for (std::size_t i = 1; i < tau.size(); ++i)
    if (tau[i] <= tau[i - 1]) fail(ErrorCode::InvalidArgument, "collapse: level set must be strictly increasing");
  if (tau.back() > t.materialized_depth())
    fail(ErrorCode::DepthExhausted, "collapse: level " + std::to_string(tau.back()) + " is not stored");

  TreeAssembler as(tau.size() - 1, t.field());
  std::vector<std::uint32_t> q_ids, w_ids;
  std::uint64_t parent_flat = 0;
  for (std::size_t k = 0; k + 1 < tau.size(); ++k) {
    std::uint64_t n = t.level_size(tau[k]);
    for (std::uint64_t i = 0; i < n; ++i) {
      VertexRef x{tau[k], i};
      auto [lo, hi] = t.descendants(x, tau[k + 1]);
      q_ids.clear();
      w_ids.clear();
      for (std::uint64_t j = lo; j < hi; ++j) {
        // Path products from x down to y.
        Rational q(1);
        FieldElement w = t.field().one();
        VertexRef y{tau[k + 1], j};
        while (y.level > x.level) {
          q *= t.q(y);
          w = w * t.w(y);
          y = t.parent(y);
        }
        q_ids.push_back(as.intern(q));
        w_ids.push_back(as.intern(w));
      }
      as.add_children(parent_flat + i, q_ids, w_ids);
    }
    as.end_level();
    parent_flat += n;
  }
  return as.finish();
}

}  // namespace htlab
