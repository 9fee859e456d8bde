#pragma once

// Brute-force reference implementations used to check the parser and repair
// modules.  None of them runs the GSS engine.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rose/fitness.hpp"
#include "rose/grammar.hpp"
#include "rose/interlingua.hpp"
#include "rose/parse_table.hpp"
#include "rose/repair.hpp"

namespace rose::testing {

// Small English-like grammar with PP-attachment and coordination ambiguity,
// one lexically ambiguous word and a nonterminal (PP) of min yield 2.
extern const char* const kToyGrammar;
std::shared_ptr<const Grammar> toy_grammar();

std::shared_ptr<const Grammar> scheduling_grammar();
std::shared_ptr<const InterlinguaSpec> scheduling_spec();
const StatModel& scheduling_stats();
const FitnessExpression& scheduling_fitness();
std::string data_path(const std::string& relative);

// Figure literals, verbatim.
extern const char* const kChunk1;  // that
extern const char* const kChunk2;  // out
extern const char* const kChunk3;  // my
extern const char* const kChunk4;  // mornings
extern const char* const kIdealStructure;

using Rng = std::mt19937_64;

// Uniform words from the lexicon, plus an out-of-lexicon word at rate foreign.
std::vector<std::string> random_words(const Grammar& g, Rng& rng, std::size_t min_len, std::size_t max_len,
                                      double foreign = 0.0);
// Random derivation from the start symbol, nullopt when no derivation within
// the bounds turned up.
std::optional<std::vector<std::string>> sample_sentence(const Grammar& g, Rng& rng, std::size_t max_tokens,
                                                        std::size_t max_depth = 7);
// Deletes or inserts lexicon words, `edits` times.
std::vector<std::string> corrupt(const Grammar& g, std::vector<std::string> tokens, Rng& rng, std::size_t edits);

// One position of a symbol string: the set of symbols it can stand for.
using Cell = std::vector<SymbolId>;
std::vector<Cell> cells_of(const Grammar& g, const std::vector<std::string>& tokens);

// Does `root` derive the cell string?  Span recursion with memoization; a
// cell matches a symbol it contains.  Requires a grammar without epsilon rules.
bool derives(const Grammar& g, SymbolId root, const std::vector<Cell>& cells);
bool in_language(const Grammar& g, const std::vector<Cell>& cells);

// Every value the actions can build for the tokens, by enumerating all
// parse trees (no epsilon rules, no unit cycles).
std::vector<Value> brute_force_values(const Grammar& g, SymbolId root, const std::vector<std::string>& tokens);

// len - longest subsequence in the language; nullopt when none is.
std::optional<std::size_t> skip_oracle(const Grammar& g, const std::vector<std::string>& tokens);

// Least cost of deleting tokens (1 each) and inserting nonterminals (their
// min yield each, at most two between consecutive kept tokens) so that the
// result is in the language.  Searches cost levels 0..max_cost in order.
std::optional<std::size_t> edit_oracle(const Grammar& g, const std::vector<std::string>& tokens,
                                       std::size_t max_cost);

// Greedy longest-leftmost segmentation over every contiguous span that some
// nonterminal derives with a structure value.
struct Segment {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const Segment&, const Segment&) = default;
};
struct Segmentation {
  std::vector<Segment> chunks;
  std::vector<std::size_t> uncovered;
};
Segmentation restarts_oracle(const Grammar& g, const std::vector<std::string>& tokens);

// Textbook LR(0) collection with SLR(1) reduce filtering, built from item
// sets directly.  Actions are encoded like TableAction.
struct SlrTable {
  struct Act {
    int kind;  // 0 shift, 1 reduce, 2 accept
    std::uint32_t target;
    friend auto operator<=>(const Act&, const Act&) = default;
  };
  std::vector<std::vector<std::vector<Act>>> action;  // [state][terminal]
  std::vector<std::vector<std::optional<std::uint32_t>>> go;  // [state][symbol]
};
SlrTable textbook_slr(const Grammar& g);
// Empty when the tables agree up to state renumbering, else the first
// difference found.
std::string compare_tables(const ParseTable& table, const SlrTable& reference);

// Least terminal yield using derivation trees of depth <= depth.
std::optional<std::size_t> bounded_min_yield(const Grammar& g, SymbolId s, std::size_t depth);

// Every program with distinct leaves over n chunks, any shape, written
// independently of enumerate_programs.
std::vector<RepairProgram> all_programs(std::size_t n, std::size_t max_depth);

// Random structure valid under the spec.
FsPtr random_structure(const InterlinguaSpec& spec, Rng& rng, std::size_t depth = 2);
FsPtr random_structure_of(const InterlinguaSpec& spec, const std::string& frame, Rng& rng, std::size_t depth);

}  // namespace rose::testing
