#include "rose/glr.hpp"

#include <algorithm>
#include <ostream>

#include "gss_engine.hpp"
#include "rose/error.hpp"

namespace rose {

namespace detail {

namespace {

std::size_t mix(std::size_t h, std::size_t v) { return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)); }

bool violates(const Value& v, const InterlinguaSpec* spec) {
  if (!spec) return false;
  const FsPtr* fs = std::get_if<FsPtr>(&v);
  return fs && *fs && !is_valid(**fs, *spec);
}

bool analysis_less(const Analysis& a, const Analysis& b) {
  if (a.deviation_penalty != b.deviation_penalty) return a.deviation_penalty < b.deviation_penalty;
  return a.signature < b.signature;
}

bool same_analysis(const Analysis& a, const Analysis& b) {
  return a.begin == b.begin && a.end == b.end && a.skipped == b.skipped && a.inserted == b.inserted &&
         values_equal(a.value, b.value);
}

}  // namespace

GssEngine::GssEngine(const ParseTable& table, EngineConfig config)
    : table_(table), grammar_(table.grammar()), config_(config) {}

std::uint64_t GssEngine::key(std::uint32_t state, std::uint32_t penalty, std::uint32_t run) {
  return std::uint64_t{state} | (std::uint64_t{penalty} << 32) | (std::uint64_t{run} << 56);
}

std::size_t GssEngine::hash_derivation(const Derivation& d) {
  std::size_t h = hash_value(d.value);
  for (auto s : d.skipped) h = mix(h, s);
  for (auto [nt, p] : d.inserted) h = mix(mix(h, nt), p);
  return h;
}

bool GssEngine::same_derivation(const Derivation& a, const Derivation& b) {
  return a.hash == b.hash && a.skipped == b.skipped && a.inserted == b.inserted && values_equal(a.value, b.value);
}

std::uint32_t GssEngine::node_at(std::uint32_t state, std::uint32_t pos, std::uint32_t penalty, std::uint32_t run,
                                 std::uint32_t stamp) {
  const auto k = key(state, penalty, run);
  if (config_.packing) {
    auto it = frontier_index_.find(k);
    if (it != frontier_index_.end()) return it->second;
  }
  if (nodes_.size() >= config_.max_nodes)
    throw Error(ErrorCode::InvalidArgument, "parse exceeded the stack node limit");
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({state, pos, penalty, run, stamp, {}});
  frontier_.push_back(id);
  if (config_.packing) frontier_index_.emplace(k, id);
  return id;
}

bool GssEngine::add_link(std::uint32_t from, std::uint32_t to, DerivPtr d, std::uint32_t stamp) {
  std::size_t parallel = 0;
  for (const auto& l : nodes_[from].links) {
    if (l.to != to) continue;
    if (same_derivation(*l.d, *d)) return false;
    ++parallel;
  }
  if (parallel >= config_.max_links_per_edge) return false;
  nodes_[from].links.push_back({to, std::move(d), stamp});
  return true;
}

bool GssEngine::add_edge(std::uint32_t state, std::uint32_t pos, std::uint32_t penalty, std::uint32_t run,
                         std::uint32_t to, DerivPtr d, std::uint32_t stamp) {
  if (penalty > config_.max_penalty) return false;
  if (!config_.packing) {
    // Without packing each derivation gets its own node, but an identical
    // derivation over the same predecessor is still the same stack.
    for (auto id : frontier_) {
      const Node& n = nodes_[id];
      if (n.state != state || n.penalty != penalty || n.run != run) continue;
      for (const auto& l : n.links)
        if (l.to == to && same_derivation(*l.d, *d)) return false;
    }
    const auto id = static_cast<std::uint32_t>(nodes_.size());
    if (nodes_.size() >= config_.max_nodes)
      throw Error(ErrorCode::InvalidArgument, "parse exceeded the stack node limit");
    nodes_.push_back({state, pos, penalty, run, stamp, {}});
    frontier_.push_back(id);
    nodes_[id].links.push_back({to, std::move(d), stamp});
    return true;
  }
  const auto id = node_at(state, pos, penalty, run, stamp);
  return add_link(id, to, std::move(d), stamp);
}

bool GssEngine::apply_reduction(std::uint32_t top, std::uint32_t bottom, std::uint32_t rule_id,
                                std::span<const Derivation* const> children, std::uint32_t pass) {
  const Rule& rule = grammar_.rule(rule_id);
  auto target = table_.go(nodes_[bottom].state, rule.lhs);
  if (!target) return false;

  std::vector<Value> values;
  values.reserve(children.size());
  for (const auto* c : children) values.push_back(c->value);
  auto value = rule.action.evaluate(values);
  if (!value || violates(*value, config_.spec)) return false;

  auto d = std::make_shared<Derivation>();
  d->value = std::move(*value);
  d->category = rule.lhs;
  const auto pos = nodes_[top].pos;
  d->begin = children.empty() ? pos : children.front()->begin;
  d->end = children.empty() ? pos : children.back()->end;
  for (const auto* c : children) {
    d->skipped.insert(d->skipped.end(), c->skipped.begin(), c->skipped.end());
    d->inserted.insert(d->inserted.end(), c->inserted.begin(), c->inserted.end());
    d->penalty += c->penalty;
    d->signature.insert(d->signature.end(), c->signature.begin(), c->signature.end());
  }
  d->signature.push_back(rule_id);
  d->hash = hash_derivation(*d);
  const auto penalty = nodes_[bottom].penalty + d->penalty;
  return add_edge(*target, pos, penalty, nodes_[top].run, bottom, std::move(d), pass);
}

bool GssEngine::reduce_paths(std::uint32_t top, std::uint32_t rule_id, std::uint32_t pass) {
  const std::size_t length = grammar_.rule(rule_id).rhs.size();
  if (length == 0) {
    // Epsilon reductions depend only on the node, so they run once, in the
    // pass after the node appears.
    if (nodes_[top].stamp + 1 != pass) return false;
    return apply_reduction(top, top, rule_id, {}, pass);
  }

  // Semi-naive evaluation: a path is reduced in the pass after its newest
  // link appeared.  Links made during this pass wait for the next one.
  bool changed = false;
  std::vector<const Derivation*> path(length);
  std::vector<DerivPtr> keep(length);
  auto walk = [&](auto&& self, std::uint32_t node, std::size_t remaining, bool fresh) -> void {
    if (remaining == 0) {
      if (fresh) changed |= apply_reduction(top, node, rule_id, path, pass);
      return;
    }
    const std::size_t count = nodes_[node].links.size();
    for (std::size_t i = 0; i < count; ++i) {
      const Link link = nodes_[node].links[i];
      if (link.stamp >= pass) continue;
      keep[remaining - 1] = link.d;
      path[remaining - 1] = link.d.get();
      self(self, link.to, remaining - 1, fresh || link.stamp + 1 == pass);
    }
  };
  walk(walk, top, length, false);
  return changed;
}

bool GssEngine::insert_nonterminals(std::uint32_t node, std::uint32_t pass) {
  if (nodes_[node].stamp + 1 != pass) return false;
  if (nodes_[node].run >= config_.max_consecutive_insertions) return false;
  bool changed = false;
  const auto state = nodes_[node].state;
  const auto syms = table_.goto_symbols(state);
  for (SymbolId nt : syms) {
    auto yield = grammar_.min_yield_of(nt);
    if (!yield || *yield == 0) continue;  // nullable symbols come for free via epsilon rules
    const std::size_t penalty = nodes_[node].penalty + *yield;
    if (penalty > config_.max_penalty) continue;
    auto d = std::make_shared<Derivation>();
    const auto& frame = grammar_.result_frame(nt);
    if (frame) d->value = make_fs(*frame, true);
    d->category = nt;
    d->begin = d->end = nodes_[node].pos;
    d->inserted.emplace_back(nt, static_cast<std::uint32_t>(*yield));
    d->penalty = static_cast<std::uint32_t>(*yield);
    d->hash = hash_derivation(*d);
    changed |= add_edge(*table_.go(state, nt), nodes_[node].pos, static_cast<std::uint32_t>(penalty),
                        nodes_[node].run + 1, node, std::move(d), pass);
  }
  return changed;
}

void GssEngine::close_position(std::uint32_t pos, std::span<const std::vector<LexicalEntry>> readings) {
  const bool at_end = pos == readings.size();
  std::vector<SymbolId> lookahead;
  if (at_end || config_.accept_everywhere) lookahead.push_back(Grammar::kEnd);
  if (!at_end)
    for (const auto& r : readings[pos]) lookahead.push_back(r.category);
  std::sort(lookahead.begin(), lookahead.end());
  lookahead.erase(std::unique(lookahead.begin(), lookahead.end()), lookahead.end());

  std::vector<std::uint32_t> rules;
  for (std::uint32_t pass = clock_ + 1;; ++pass) {
    clock_ = pass;
    bool changed = false;
    // New nodes appended during the pass are handled next pass.
    const std::vector<std::uint32_t> snapshot = frontier_;
    for (auto id : snapshot) {
      rules.clear();
      const auto state = nodes_[id].state;
      if (config_.allow_insert && nodes_[id].penalty < config_.max_penalty) {
        // With budget left an insertion may follow, so the real lookahead
        // is unknown: reduce as LR(0).
        auto all = table_.all_reductions(state);
        rules.assign(all.begin(), all.end());
      } else {
        for (SymbolId t : lookahead)
          for (const auto& a : table_.actions(state, t))
            if (a.kind == TableAction::Kind::Reduce) rules.push_back(a.target);
        std::sort(rules.begin(), rules.end());
        rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
      }
      for (auto r : rules) changed |= reduce_paths(id, r, pass);
      if (config_.allow_insert) changed |= insert_nonterminals(id, pass);
    }
    // Nodes and links stamped this pass still need one more pass.
    bool pending = false;
    for (auto id : frontier_) {
      if (nodes_[id].stamp == pass) pending = true;
      for (const auto& l : nodes_[id].links)
        if (l.stamp == pass) pending = true;
      if (pending) break;
    }
    if (!changed && !pending) break;
  }
}

void GssEngine::collect_accepts(std::uint32_t pos, std::vector<Analysis>& out) const {
  for (auto id : frontier_) {
    const Node& n = nodes_[id];
    for (const auto& a : table_.actions(n.state, Grammar::kEnd)) {
      if (a.kind != TableAction::Kind::Accept) continue;
      for (const auto& l : n.links) {
        if (l.d->category != a.target) continue;
        const Node& root = nodes_[l.to];
        Analysis an;
        an.value = l.d->value;
        an.category = grammar_.name(l.d->category);
        an.begin = begin_;
        an.end = pos;
        for (std::size_t s = begin_; s < root.pos; ++s) an.skipped.push_back(s);
        for (auto s : l.d->skipped) an.skipped.push_back(s);
        for (auto [nt, p] : l.d->inserted) an.inserted.push_back({grammar_.name(nt), p});
        an.deviation_penalty = n.penalty;
        an.signature = l.d->signature;
        out.push_back(std::move(an));
      }
    }
  }
}

void GssEngine::advance(std::uint32_t pos, std::span<const std::vector<LexicalEntry>> readings) {
  const std::vector<std::uint32_t> current = frontier_;
  frontier_.clear();
  frontier_index_.clear();
  const std::uint32_t next = pos + 1;

  for (auto id : current) {
    for (const auto& reading : readings[pos]) {
      for (const auto& a : table_.actions(nodes_[id].state, reading.category)) {
        if (a.kind != TableAction::Kind::Shift) continue;
        auto d = std::make_shared<Derivation>();
        d->value = reading.value;
        d->category = reading.category;
        d->begin = pos;
        d->end = next;
        d->hash = hash_derivation(*d);
        add_edge(a.target, next, nodes_[id].penalty, 0, id, std::move(d), clock_);
      }
    }
  }

  if (!config_.allow_skip) return;
  for (auto id : current) {
    if (nodes_[id].penalty + 1 > config_.max_penalty) continue;
    const auto state = nodes_[id].state;
    const auto penalty = nodes_[id].penalty + 1;
    const auto run = nodes_[id].run;
    if (nodes_[id].links.empty()) {
      node_at(state, next, penalty, run, clock_);
      continue;
    }
    // The skipped word joins the derivation on top of the stack.
    const std::size_t count = nodes_[id].links.size();
    for (std::size_t i = 0; i < count; ++i) {
      const Link link = nodes_[id].links[i];
      auto d = std::make_shared<Derivation>(*link.d);
      d->end = next;
      d->skipped.push_back(pos);
      d->penalty += 1;
      d->hash = hash_derivation(*d);
      add_edge(state, next, penalty, run, link.to, std::move(d), clock_);
    }
  }
}

void GssEngine::prune_frontier() {
  if (config_.beam_width == 0 || frontier_.size() <= config_.beam_width) return;
  std::stable_sort(frontier_.begin(), frontier_.end(), [&](std::uint32_t a, std::uint32_t b) {
    const Node& x = nodes_[a];
    const Node& y = nodes_[b];
    if (x.penalty != y.penalty) return x.penalty < y.penalty;
    if (x.run != y.run) return x.run < y.run;
    return x.state < y.state;
  });
  frontier_.resize(config_.beam_width);
  std::sort(frontier_.begin(), frontier_.end());
  frontier_index_.clear();
  if (config_.packing)
    for (auto id : frontier_) {
      const Node& n = nodes_[id];
      frontier_index_.emplace(key(n.state, n.penalty, n.run), id);
    }
}

void GssEngine::dump(std::uint32_t pos) const {
  auto& os = *config_.trace;
  os << "position " << pos << " nodes " << frontier_.size() << '\n';
  for (auto id : frontier_) {
    const Node& n = nodes_[id];
    os << "  #" << id << " state " << n.state << " penalty " << n.penalty << " run " << n.run;
    for (const auto& l : n.links)
      os << " -> #" << l.to << ' ' << grammar_.name(l.d->category) << '=' << to_literal(l.d->value);
    os << '\n';
  }
}

void GssEngine::finish(std::vector<Analysis>& analyses) const {
  std::stable_sort(analyses.begin(), analyses.end(), analysis_less);
  std::vector<Analysis> unique;
  for (auto& a : analyses) {
    bool seen = std::any_of(unique.begin(), unique.end(), [&](const Analysis& u) { return same_analysis(u, a); });
    if (!seen) unique.push_back(std::move(a));
    if (unique.size() >= config_.max_analyses) break;
  }
  analyses = std::move(unique);
}

EngineResult GssEngine::run(std::span<const std::vector<LexicalEntry>> readings, std::size_t begin) {
  begin_ = begin;
  clock_ = 0;
  nodes_.clear();
  frontier_.clear();
  frontier_index_.clear();
  EngineResult result;
  if (config_.accept_everywhere) result.accepted_at.resize(readings.size() + 1);

  node_at(0, static_cast<std::uint32_t>(begin), 0, 0, 0);
  for (auto pos = static_cast<std::uint32_t>(begin);; ++pos) {
    prune_frontier();
    close_position(pos, readings);
    if (config_.trace) dump(pos);
    if (config_.accept_everywhere && pos > begin) {
      collect_accepts(pos, result.accepted_at[pos]);
      finish(result.accepted_at[pos]);
    }
    if (pos == readings.size()) {
      collect_accepts(pos, result.analyses);
      finish(result.analyses);
      break;
    }
    advance(pos, readings);
    if (frontier_.empty()) break;
  }
  return result;
}

}  // namespace detail

std::vector<Analysis> glr_parse(const ParseTable& table, std::span<const std::string> tokens,
                                const GlrOptions& options) {
  const Grammar& g = table.grammar();
  std::vector<std::vector<LexicalEntry>> readings;
  readings.reserve(tokens.size());
  for (const auto& t : tokens) {
    readings.push_back(g.lookup(t));
    if (readings.back().empty()) throw Error(ErrorCode::UnknownToken, "unknown token: " + t);
  }
  detail::EngineConfig config;
  config.packing = options.packing;
  config.spec = options.spec;
  config.trace = options.trace;
  return detail::GssEngine(table, config).run(readings).analyses;
}

Value reduce_with_action(const Grammar& g, std::size_t rule, std::span<const Value> children,
                         const InterlinguaSpec* spec) {
  if (rule >= g.rules().size()) throw Error(ErrorCode::InvalidArgument, "no rule " + std::to_string(rule));
  auto v = g.rule(rule).action.evaluate(children);
  if (!v) throw Error(ErrorCode::SpecViolation, "action " + g.rule(rule).action.to_string() + " does not apply");
  if (spec) {
    if (const FsPtr* fs = std::get_if<FsPtr>(&*v); fs && *fs) {
      auto problems = validate(**fs, *spec);
      if (!problems.empty()) throw Error(ErrorCode::SpecViolation, "action result rejected by the spec");
    }
  }
  return *v;
}

}  // namespace rose
