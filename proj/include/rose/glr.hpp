#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rose/grammar.hpp"
#include "rose/interlingua.hpp"
#include "rose/parse_table.hpp"

namespace rose {

struct Insertion {
  std::string nonterminal;
  std::size_t penalty = 0;

  friend bool operator==(const Insertion&, const Insertion&) = default;
};

// One analysis of (part of) an utterance.  The span is half-open over token
// indices; skipped tokens inside it were deleted, inserted nonterminals were
// hypothesized without consuming input.
struct Analysis {
  Value value;
  std::string category;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::vector<std::size_t> skipped;
  std::vector<Insertion> inserted;
  std::size_t deviation_penalty = 0;
  // Rule ids in derivation post-order; the rule-order tie-break key.
  std::vector<std::uint32_t> signature;

  std::size_t covered() const { return end - begin - skipped.size(); }
  const FsPtr* structure() const { return std::get_if<FsPtr>(&value); }
};

inline constexpr std::size_t kMaxAnalyses = 64;

struct GlrOptions {
  // Merge stack nodes sharing (state, position); disabling only costs time.
  bool packing = true;
  // Actions building structures the spec rejects prune their parse path.
  const InterlinguaSpec* spec = nullptr;
  // Line-oriented GSS snapshots after every position.
  std::ostream* trace = nullptr;
};

// All complete parses of the token sequence, no flexibility.  Throws
// unknown-token for a word outside the lexicon.
std::vector<Analysis> glr_parse(const ParseTable& table, std::span<const std::string> tokens,
                                const GlrOptions& options = {});

// Evaluates a rule's action over child values.  Throws spec-violation when
// the action cannot apply or builds a structure the spec rejects.
Value reduce_with_action(const Grammar& g, std::size_t rule, std::span<const Value> children,
                         const InterlinguaSpec* spec = nullptr);

}  // namespace rose
