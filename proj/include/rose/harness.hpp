#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rose/fitness.hpp"
#include "rose/flex.hpp"
#include "rose/repair.hpp"

namespace rose {

struct CorpusEntry {
  std::string id;
  std::vector<std::string> tokens;
  FsPtr gold;
};

// Records are `id <tab> tokens <tab> gold literal`, one per line.
std::vector<CorpusEntry> parse_corpus(std::string_view text, const InterlinguaSpec& spec);
std::vector<CorpusEntry> load_corpus(const std::string& path, const InterlinguaSpec& spec);
std::string serialize_corpus(const std::vector<CorpusEntry>& corpus, const InterlinguaSpec& spec);

enum class Bucket { Nil, Bad, Partial, Okay, Perfect };
inline constexpr std::array<Bucket, 5> kBuckets{Bucket::Nil, Bucket::Bad, Bucket::Partial, Bucket::Okay,
                                                Bucket::Perfect};
const char* to_string(Bucket b);

// Automated stand-in for human quality judgments.  A null result is NIL.
Bucket grade(const FsPtr& result, const FeatureStructure& gold);

struct StrategyConfig {
  std::string label;
  FlexConfig flex;
  bool repair = false;
};

// MDP 1, MDP 3, MDP 5, restarts, restarts+repair.
std::vector<StrategyConfig> paper_strategies();
// Labels as printed: "MDP1", "MDP3", "MDP5", "restarts", "restarts+repair"
// (case-insensitive; "mdpK" for any K).
StrategyConfig strategy_from_label(std::string_view label);

struct TrainedArtifacts {
  StatModel stats;
  FitnessExpression fitness;
  GpParams gp;
};

struct SentenceResult {
  std::string id;
  std::size_t tokens = 0;
  FsPtr result;
  Bucket bucket = Bucket::Nil;
  double seconds = 0;
  bool repaired = false;
  std::size_t chunk_count = 0;
};

struct StrategyReport {
  std::string label;
  std::vector<SentenceResult> sentences;

  std::array<std::size_t, 5> counts() const;
  double percent(Bucket b) const;
  double total_seconds() const;
  double mean_seconds() const;
};

// Per-sentence parse (and repair) under one strategy.  Faults become NIL.
// Restarts without repair answers with the largest chunk.
StrategyReport run_strategy(const std::vector<CorpusEntry>& corpus, const RobustParser& parser,
                            const StrategyConfig& strategy, const TrainedArtifacts& artifacts);

// Writes quality.csv and timing.csv.  Throws empty-corpus (writing nothing)
// when there is no sentence to report.
void emit_report(const std::vector<StrategyReport>& reports, const std::string& out_dir);
std::string quality_csv(const std::vector<StrategyReport>& reports);
std::string timing_csv(const std::vector<StrategyReport>& reports);

struct GenConfig {
  std::size_t sentences = 100;
  std::uint64_t seed = 1;
  double delete_rate = 0.1;
  double insert_rate = 0.1;
  double foreign_rate = 0.1;
  std::size_t max_tokens = 12;
  std::size_t max_depth = 8;
};

// Samples sentences from the grammar, labels each with its parse as gold,
// then corrupts the tokens.  Deterministic under the seed.
std::vector<CorpusEntry> generate_corpus(const Grammar& grammar, const InterlinguaSpec& spec, const GenConfig& config);

struct SyntheticDomain {
  std::string grammar;
  std::string spec;
};

// Layered random grammar with at least min_rules rules plus a permissive
// spec, for timing runs at a grammar size closer to a real system.
SyntheticDomain synthesize_domain(std::size_t min_rules, std::uint64_t seed);

// For each entry: chunk it, enumerate every repair program over at most
// max_chunks chunks, rank results against gold.  Entries yielding fewer than
// two distinct results are dropped.
std::vector<RankedExample> build_ranked_examples(const std::vector<CorpusEntry>& corpus, const RobustParser& parser,
                                                 const StatModel& stats, std::size_t max_chunks = 5);

}  // namespace rose
