#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "rose/glr.hpp"

namespace rose::detail {

inline constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

struct EngineConfig {
  bool allow_skip = false;
  bool allow_insert = false;
  std::size_t max_penalty = 0;
  std::size_t beam_width = 0;  // 0: keep every node
  std::size_t max_consecutive_insertions = 2;
  bool packing = true;
  // Check for complete analyses at every position (chunk parsing), not only
  // at the end of input.
  bool accept_everywhere = false;
  std::size_t max_analyses = kMaxAnalyses;
  std::size_t max_links_per_edge = kMaxAnalyses;
  std::size_t max_nodes = 2'000'000;
  const InterlinguaSpec* spec = nullptr;
  std::ostream* trace = nullptr;
};

struct EngineResult {
  // Complete analyses ending at the last position.
  std::vector<Analysis> analyses;
  // accept_everywhere: analyses ending at each position, indexed by end.
  std::vector<std::vector<Analysis>> accepted_at;
};

// Generalized LR driver over a graph-structured stack.  Stack nodes are keyed
// by (state, position, accumulated penalty, insertions since last shift);
// links carry eagerly computed semantic values.  Word skipping duplicates a
// frontier node one position later at penalty + 1; nonterminal insertion is a
// goto without consuming input at penalty + min_yield.
class GssEngine {
 public:
  GssEngine(const ParseTable& table, EngineConfig config);

  EngineResult run(std::span<const std::vector<LexicalEntry>> readings, std::size_t begin = 0);

 private:
  struct Derivation {
    Value value;
    SymbolId category = 0;
    std::uint32_t begin = 0;
    std::uint32_t end = 0;
    std::vector<std::uint32_t> skipped;
    std::vector<std::pair<SymbolId, std::uint32_t>> inserted;
    std::uint32_t penalty = 0;
    std::vector<std::uint32_t> signature;
    std::size_t hash = 0;
  };
  using DerivPtr = std::shared_ptr<const Derivation>;

  struct Link {
    std::uint32_t to;
    DerivPtr d;
    std::uint32_t stamp;
  };
  struct Node {
    std::uint32_t state;
    std::uint32_t pos;
    std::uint32_t penalty;
    std::uint32_t run;
    std::uint32_t stamp;
    std::vector<Link> links;
  };

  static std::uint64_t key(std::uint32_t state, std::uint32_t penalty, std::uint32_t run);
  static std::size_t hash_derivation(const Derivation& d);
  static bool same_derivation(const Derivation& a, const Derivation& b);

  std::uint32_t node_at(std::uint32_t state, std::uint32_t pos, std::uint32_t penalty, std::uint32_t run,
                        std::uint32_t stamp);
  bool add_link(std::uint32_t from, std::uint32_t to, DerivPtr d, std::uint32_t stamp);
  bool add_edge(std::uint32_t state, std::uint32_t pos, std::uint32_t penalty, std::uint32_t run, std::uint32_t to,
                DerivPtr d, std::uint32_t stamp);

  void close_position(std::uint32_t pos, std::span<const std::vector<LexicalEntry>> readings);
  bool reduce_paths(std::uint32_t top, std::uint32_t rule, std::uint32_t pass);
  bool apply_reduction(std::uint32_t top, std::uint32_t bottom, std::uint32_t rule,
                       std::span<const Derivation* const> children, std::uint32_t pass);
  bool insert_nonterminals(std::uint32_t node, std::uint32_t pass);
  void collect_accepts(std::uint32_t pos, std::vector<Analysis>& out) const;
  void advance(std::uint32_t pos, std::span<const std::vector<LexicalEntry>> readings);
  void prune_frontier();
  void dump(std::uint32_t pos) const;
  void finish(std::vector<Analysis>& analyses) const;

  const ParseTable& table_;
  const Grammar& grammar_;
  EngineConfig config_;
  std::size_t begin_ = 0;
  // Last closure pass; stamps grow across positions so older links always
  // compare as settled.
  std::uint32_t clock_ = 0;

  std::vector<Node> nodes_;
  std::vector<std::uint32_t> frontier_;
  std::unordered_map<std::uint64_t, std::uint32_t> frontier_index_;
};

}  // namespace rose::detail
