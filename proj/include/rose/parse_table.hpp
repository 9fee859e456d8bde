#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rose/grammar.hpp"

namespace rose {

struct TableAction {
  enum class Kind : std::uint8_t { Shift, Reduce, Accept };
  Kind kind = Kind::Shift;
  std::uint32_t target = 0;  // Shift: state; Reduce: rule id; Accept: accepted nonterminal

  friend bool operator==(const TableAction&, const TableAction&) = default;
  friend auto operator<=>(const TableAction&, const TableAction&) = default;
};

// Which symbol(s) a table recognizes.  Chunk tables accept any nonterminal
// spanning the input, which is what the restarts parser needs.
enum class TableStart { Grammar, AnyCategory };

// SLR parse table over the LR(0) canonical collection.  Cells may hold
// several actions; conflicts are left for the GLR driver to fork on.
class ParseTable {
 public:
  using Item = std::pair<std::uint32_t, std::uint32_t>;  // (rule id, dot); ids >= rule count are augmented rules

  std::size_t state_count() const { return gotos_.size(); }
  const Grammar& grammar() const { return *grammar_; }
  std::shared_ptr<const Grammar> grammar_ptr() const { return grammar_; }
  TableStart start_kind() const { return start_kind_; }

  std::span<const TableAction> actions(std::uint32_t state, SymbolId terminal) const;
  std::optional<std::uint32_t> go(std::uint32_t state, SymbolId nonterminal) const;
  // Reductions of a state regardless of lookahead (LR(0) behaviour).
  std::span<const std::uint32_t> all_reductions(std::uint32_t state) const { return all_reduce_[state]; }
  // Nonterminals with a goto out of the state.
  std::span<const SymbolId> goto_symbols(std::uint32_t state) const { return goto_syms_[state]; }
  const std::vector<Item>& items(std::uint32_t state) const { return items_[state]; }

  std::size_t conflict_count() const;

  // Canonical text form, keyed by the grammar hash.
  std::string serialize() const;
  // nullopt when the text belongs to a different grammar or version.
  static std::optional<ParseTable> deserialize(std::string_view text, std::shared_ptr<const Grammar> g);

  friend ParseTable compile_tables(std::shared_ptr<const Grammar> g, TableStart start);

 private:
  std::shared_ptr<const Grammar> grammar_;
  TableStart start_kind_ = TableStart::Grammar;
  std::size_t terminal_span_ = 0;  // symbol count; action rows are indexed by symbol id
  std::vector<std::vector<std::vector<TableAction>>> actions_;  // [state][symbol]
  std::vector<std::vector<std::pair<SymbolId, std::uint32_t>>> gotos_;
  std::vector<std::vector<std::uint32_t>> all_reduce_;
  std::vector<std::vector<SymbolId>> goto_syms_;
  std::vector<std::vector<Item>> items_;
};

ParseTable compile_tables(std::shared_ptr<const Grammar> g, TableStart start = TableStart::Grammar);

// FIRST/FOLLOW sets, exposed for tests and diagnostics.
struct GrammarSets {
  std::vector<bool> nullable;
  std::vector<std::vector<bool>> first;   // [symbol][terminal]
  std::vector<std::vector<bool>> follow;  // [nonterminal][terminal]
};
GrammarSets compute_sets(const Grammar& g, TableStart start = TableStart::Grammar);

}  // namespace rose
