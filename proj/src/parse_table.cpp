#include "rose/parse_table.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

#include "rose/error.hpp"
#include "rose/text_util.hpp"

namespace rose {

namespace {

constexpr std::string_view kTableMagic = "rose-table 1";

// Rules of the augmented grammar: the grammar's own rules followed by the
// start productions S' -> X.
struct Augmented {
  const Grammar& g;
  std::vector<SymbolId> starts;

  std::uint32_t base() const { return static_cast<std::uint32_t>(g.rules().size()); }
  std::size_t length(std::uint32_t r) const { return r < base() ? g.rule(r).rhs.size() : 1; }
  SymbolId at(std::uint32_t r, std::size_t i) const { return r < base() ? g.rule(r).rhs[i] : starts[r - base()]; }
};

std::vector<SymbolId> start_symbols(const Grammar& g, TableStart start) {
  if (start == TableStart::Grammar) return {g.start()};
  std::vector<SymbolId> out;
  for (SymbolId nt : g.nonterminals()) {
    bool has_rule = std::any_of(g.rules().begin(), g.rules().end(), [&](const Rule& r) { return r.lhs == nt; });
    if (has_rule) out.push_back(nt);
  }
  return out;
}

}  // namespace

GrammarSets compute_sets(const Grammar& g, TableStart start) {
  const std::size_t n = g.symbol_count();
  GrammarSets sets;
  sets.nullable.assign(n, false);
  sets.first.assign(n, std::vector<bool>(n, false));
  sets.follow.assign(n, std::vector<bool>(n, false));
  for (SymbolId s = 0; s < n; ++s)
    if (g.is_terminal(s)) sets.first[s][s] = true;

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : g.rules()) {
      bool all_nullable = true;
      for (SymbolId s : r.rhs) {
        for (SymbolId t = 0; t < n; ++t)
          if (sets.first[s][t] && !sets.first[r.lhs][t]) sets.first[r.lhs][t] = changed = true;
        if (!sets.nullable[s]) {
          all_nullable = false;
          break;
        }
      }
      if (all_nullable && !sets.nullable[r.lhs]) sets.nullable[r.lhs] = changed = true;
    }
  }

  for (SymbolId s : start_symbols(g, start)) sets.follow[s][Grammar::kEnd] = true;
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& r : g.rules()) {
      for (std::size_t i = 0; i < r.rhs.size(); ++i) {
        SymbolId b = r.rhs[i];
        if (g.is_terminal(b)) continue;
        bool rest_nullable = true;
        for (std::size_t j = i + 1; j < r.rhs.size() && rest_nullable; ++j) {
          SymbolId c = r.rhs[j];
          for (SymbolId t = 0; t < n; ++t)
            if (sets.first[c][t] && !sets.follow[b][t]) sets.follow[b][t] = changed = true;
          rest_nullable = sets.nullable[c];
        }
        if (rest_nullable)
          for (SymbolId t = 0; t < n; ++t)
            if (sets.follow[r.lhs][t] && !sets.follow[b][t]) sets.follow[b][t] = changed = true;
      }
    }
  }
  return sets;
}

ParseTable compile_tables(std::shared_ptr<const Grammar> gp, TableStart start) {
  const Grammar& g = *gp;
  Augmented aug{g, start_symbols(g, start)};
  const std::size_t nsym = g.symbol_count();

  std::vector<std::vector<std::uint32_t>> rules_of(nsym);
  for (std::uint32_t r = 0; r < g.rules().size(); ++r) rules_of[g.rule(r).lhs].push_back(r);

  auto closure = [&](std::vector<ParseTable::Item> items) {
    std::vector<bool> expanded(nsym, false);
    for (std::size_t i = 0; i < items.size(); ++i) {
      auto [r, dot] = items[i];
      if (dot >= aug.length(r)) continue;
      SymbolId b = aug.at(r, dot);
      if (g.is_terminal(b) || expanded[b]) continue;
      expanded[b] = true;
      for (std::uint32_t br : rules_of[b]) items.emplace_back(br, 0);
    }
    std::sort(items.begin(), items.end());
    items.erase(std::unique(items.begin(), items.end()), items.end());
    return items;
  };

  ParseTable table;
  table.grammar_ = gp;
  table.start_kind_ = start;
  table.terminal_span_ = nsym;

  std::map<std::vector<ParseTable::Item>, std::uint32_t> ids;
  std::vector<ParseTable::Item> init;
  for (std::uint32_t k = 0; k < aug.starts.size(); ++k) init.emplace_back(aug.base() + k, 0);
  table.items_.push_back(closure(std::move(init)));
  ids.emplace(table.items_.back(), 0);

  std::vector<std::vector<std::pair<SymbolId, std::uint32_t>>> transitions;
  for (std::uint32_t s = 0; s < table.items_.size(); ++s) {
    std::map<SymbolId, std::vector<ParseTable::Item>> next;
    for (auto [r, dot] : table.items_[s])
      if (dot < aug.length(r)) next[aug.at(r, dot)].emplace_back(r, dot + 1);
    std::vector<std::pair<SymbolId, std::uint32_t>> out;
    for (auto& [sym, kernel] : next) {
      auto closed = closure(std::move(kernel));
      auto [it, inserted] = ids.emplace(closed, static_cast<std::uint32_t>(table.items_.size()));
      if (inserted) table.items_.push_back(std::move(closed));
      out.emplace_back(sym, it->second);
    }
    transitions.push_back(std::move(out));
  }

  const GrammarSets sets = compute_sets(g, start);
  const std::size_t nstates = table.items_.size();
  table.actions_.assign(nstates, std::vector<std::vector<TableAction>>(nsym));
  table.gotos_.assign(nstates, {});
  table.all_reduce_.assign(nstates, {});
  table.goto_syms_.assign(nstates, {});
  for (std::uint32_t s = 0; s < nstates; ++s) {
    for (auto [sym, to] : transitions[s]) {
      if (g.is_terminal(sym)) {
        table.actions_[s][sym].push_back({TableAction::Kind::Shift, to});
      } else {
        table.gotos_[s].emplace_back(sym, to);
        table.goto_syms_[s].push_back(sym);
      }
    }
    for (auto [r, dot] : table.items_[s]) {
      if (dot < aug.length(r)) continue;
      if (r >= aug.base()) {
        table.actions_[s][Grammar::kEnd].push_back({TableAction::Kind::Accept, aug.starts[r - aug.base()]});
        continue;
      }
      table.all_reduce_[s].push_back(r);
      const SymbolId lhs = g.rule(r).lhs;
      for (SymbolId t = 0; t < nsym; ++t)
        if (g.is_terminal(t) && sets.follow[lhs][t]) table.actions_[s][t].push_back({TableAction::Kind::Reduce, r});
    }
    for (auto& cell : table.actions_[s]) {
      std::sort(cell.begin(), cell.end());
      cell.erase(std::unique(cell.begin(), cell.end()), cell.end());
    }
    std::sort(table.all_reduce_[s].begin(), table.all_reduce_[s].end());
  }
  return table;
}

std::span<const TableAction> ParseTable::actions(std::uint32_t state, SymbolId terminal) const {
  if (state >= actions_.size() || terminal >= terminal_span_) return {};
  return actions_[state][terminal];
}

std::optional<std::uint32_t> ParseTable::go(std::uint32_t state, SymbolId nonterminal) const {
  for (auto [sym, to] : gotos_[state])
    if (sym == nonterminal) return to;
  return std::nullopt;
}

std::size_t ParseTable::conflict_count() const {
  std::size_t n = 0;
  for (const auto& row : actions_)
    for (const auto& cell : row)
      if (cell.size() > 1) ++n;
  return n;
}

std::string ParseTable::serialize() const {
  const Grammar& g = *grammar_;
  std::ostringstream os;
  os << kTableMagic << '\n';
  os << "grammar " << std::hex << g.hash() << std::dec << '\n';
  os << "start " << (start_kind_ == TableStart::Grammar ? "grammar" : "any") << '\n';
  os << "states " << state_count() << '\n';
  for (std::uint32_t s = 0; s < state_count(); ++s) {
    os << "state " << s;
    for (auto [r, dot] : items_[s]) os << ' ' << r << '.' << dot;
    os << '\n';
    for (SymbolId t = 0; t < terminal_span_; ++t)
      for (const auto& a : actions_[s][t]) {
        os << "action " << s << ' ' << g.name(t) << ' ';
        switch (a.kind) {
          case TableAction::Kind::Shift: os << "s " << a.target; break;
          case TableAction::Kind::Reduce: os << "r " << a.target; break;
          case TableAction::Kind::Accept: os << "acc " << g.name(a.target); break;
        }
        os << '\n';
      }
    for (auto [sym, to] : gotos_[s]) os << "goto " << s << ' ' << g.name(sym) << ' ' << to << '\n';
  }
  return os.str();
}

std::optional<ParseTable> ParseTable::deserialize(std::string_view text, std::shared_ptr<const Grammar> gp) {
  const Grammar& g = *gp;
  auto lines = split_lines(text);
  if (lines.size() < 4 || lines[0] != kTableMagic) return std::nullopt;
  std::ostringstream hash;
  hash << "grammar " << std::hex << g.hash();
  if (lines[1] != hash.str()) return std::nullopt;

  ParseTable t;
  t.grammar_ = gp;
  t.terminal_span_ = g.symbol_count();
  auto start = split_ws(lines[2]);
  if (start.size() != 2) return std::nullopt;
  t.start_kind_ = start[1] == "any" ? TableStart::AnyCategory : TableStart::Grammar;
  auto states = split_ws(lines[3]);
  if (states.size() != 2) return std::nullopt;
  const std::size_t n = std::stoul(std::string(states[1]));
  t.actions_.assign(n, std::vector<std::vector<TableAction>>(g.symbol_count()));
  t.gotos_.assign(n, {});
  t.all_reduce_.assign(n, {});
  t.goto_syms_.assign(n, {});
  t.items_.assign(n, {});

  auto sym = [&](std::string_view name) {
    auto id = g.find(name);
    if (!id) throw Error(ErrorCode::Syntax, "table names unknown symbol " + std::string(name));
    return *id;
  };
  auto num = [](std::string_view v) { return static_cast<std::uint32_t>(std::stoul(std::string(v))); };
  for (std::size_t i = 4; i < lines.size(); ++i) {
    auto f = split_ws(lines[i]);
    if (f.empty()) continue;
    if (f[0] == "state") {
      std::uint32_t s = num(f[1]);
      for (std::size_t k = 2; k < f.size(); ++k) {
        auto dot = f[k].find('.');
        std::uint32_t r = num(f[k].substr(0, dot));
        std::uint32_t d = num(f[k].substr(dot + 1));
        t.items_[s].emplace_back(r, d);
        if (r < g.rules().size() && d == g.rule(r).rhs.size()) t.all_reduce_[s].push_back(r);
      }
    } else if (f[0] == "action" && f.size() == 5) {
      std::uint32_t s = num(f[1]);
      SymbolId term = sym(f[2]);
      TableAction a;
      if (f[3] == "s") a = {TableAction::Kind::Shift, num(f[4])};
      else if (f[3] == "r") a = {TableAction::Kind::Reduce, num(f[4])};
      else a = {TableAction::Kind::Accept, sym(f[4])};
      t.actions_[s][term].push_back(a);
    } else if (f[0] == "goto" && f.size() == 4) {
      std::uint32_t s = num(f[1]);
      SymbolId nt = sym(f[2]);
      t.gotos_[s].emplace_back(nt, num(f[3]));
      t.goto_syms_[s].push_back(nt);
    } else {
      return std::nullopt;
    }
  }
  for (auto& r : t.all_reduce_) std::sort(r.begin(), r.end());
  return t;
}

}  // namespace rose
