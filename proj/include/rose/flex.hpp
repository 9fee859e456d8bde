#pragma once

#include <cstddef>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rose/glr.hpp"

namespace rose {

enum class FlexMode { FullParse, Skip, Restarts, Mdp };

std::string_view to_string(FlexMode mode);
// "full-parse", "skip", "restarts", "mdp"; throws invalid-argument otherwise.
FlexMode parse_flex_mode(std::string_view text);

struct FlexConfig {
  FlexMode mode = FlexMode::Mdp;
  std::size_t max_penalty = 1;  // K in MDP K; ignored outside mdp mode
  std::size_t beam_width = 256;  // 0: unbounded, the admissible setting
  bool packing = true;
  const InterlinguaSpec* spec = nullptr;
  std::ostream* trace = nullptr;
};

// Contiguous fragments of a restarts parse, left to right.
struct ChunkSet {
  std::vector<Analysis> chunks;
  std::vector<std::size_t> uncovered;
  std::size_t token_count = 0;
};

// GLR*: analyses of subsequences of the input, penalty = words skipped.
// Unknown words are simply skipped.
std::vector<Analysis> skip_parse(const ParseTable& table, std::span<const std::string> tokens,
                                 const FlexConfig& config = {FlexMode::Skip});

// Left-to-right maximal munch.  The table must accept any category
// (TableStart::AnyCategory).  Only structure-valued spans count as chunks.
ChunkSet restarts_parse(const ParseTable& chunk_table, std::span<const std::string> tokens,
                        const FlexConfig& config = {FlexMode::Restarts});

// Minimum distance parsing with word deletion and nonterminal insertion,
// every analysis within config.max_penalty.
std::vector<Analysis> mdp_parse(const ParseTable& table, std::span<const std::string> tokens,
                                const FlexConfig& config = {});

// Least deviation, then more tokens covered, fewer insertions, lowest
// rule-order signature.
std::optional<Analysis> select_best(std::span<const Analysis> analyses);

// Grammar, both tables and the spec bundled for repeated parsing.
class RobustParser {
 public:
  RobustParser(std::shared_ptr<const Grammar> grammar, std::shared_ptr<const InterlinguaSpec> spec = nullptr);

  const Grammar& grammar() const { return *grammar_; }
  const ParseTable& table() const { return table_; }
  const ParseTable& chunk_table() const { return chunk_table_; }
  const InterlinguaSpec* spec() const { return spec_.get(); }

  // full-parse, skip and mdp return analyses; restarts returns its chunks
  // as analyses in span order.
  std::vector<Analysis> parse(std::span<const std::string> tokens, FlexConfig config) const;
  ChunkSet chunks(std::span<const std::string> tokens, FlexConfig config = {FlexMode::Restarts}) const;

 private:
  std::shared_ptr<const Grammar> grammar_;
  std::shared_ptr<const InterlinguaSpec> spec_;
  ParseTable table_;
  ParseTable chunk_table_;
};

}  // namespace rose
