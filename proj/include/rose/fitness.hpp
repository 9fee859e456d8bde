#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rose/interlingua.hpp"
#include "rose/program.hpp"

namespace rose {

// Mutual information between a slot and the type of its filler, estimated
// from gold structures with add-one smoothing over the declared
// slot x type table.
class StatModel : public SlotScorer {
 public:
  StatModel() = default;
  StatModel(std::vector<std::string> slots, std::vector<std::string> types, double smoothing = 1.0);

  void count(std::string_view slot, std::string_view type, double n = 1.0);

  std::optional<double> score(std::string_view slot, std::string_view filler_type) const override;
  // 0 for pairs outside the table.
  double mi(std::string_view slot, std::string_view type) const;
  double probability(std::string_view slot, std::string_view type) const;
  double raw_count(std::string_view slot, std::string_view type) const;

  const std::vector<std::string>& slots() const { return slots_; }
  const std::vector<std::string>& types() const { return types_; }
  double smoothing() const { return smoothing_; }

  std::string serialize() const;
  static StatModel parse(std::string_view text);
  static StatModel load(const std::string& path);

 private:
  std::optional<std::pair<std::size_t, std::size_t>> cell(std::string_view slot, std::string_view type) const;

  std::vector<std::string> slots_;
  std::vector<std::string> types_;
  std::vector<double> counts_;  // raw, row-major [slot][type]
  double smoothing_ = 1.0;
};

// Throws empty-corpus on no structures, spec-violation on an invalid one.
StatModel train_mi(std::span<const FsPtr> corpus, const InterlinguaSpec& spec);

struct FeatureTriple {
  double n_ops = 0;
  double size_score = 0;
  double avg_stat = 0;

  std::array<double, 3> vars() const { return {n_ops, size_score, avg_stat}; }
  friend bool operator==(const FeatureTriple&, const FeatureTriple&) = default;
};

FeatureTriple score_features(const Hypothesis& h, const StatModel& stats);

// Arithmetic expression over x1 = n_ops, x2 = size_score, x3 = avg_stat.
// Division is protected: a zero denominator yields 1.
class FitnessExpression {
 public:
  enum class Op { Var, Const, Add, Sub, Mul, Div };
  struct Node {
    Op op = Op::Const;
    double value = 0;  // Const
    int var = 0;       // Var: 0..2

    friend bool operator==(const Node&, const Node&) = default;
  };

  FitnessExpression() : nodes_{{Op::Const, 0, 0}} {}
  explicit FitnessExpression(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}
  static FitnessExpression variable(int index);
  static FitnessExpression constant(double value);
  static FitnessExpression binary(Op op, const FitnessExpression& a, const FitnessExpression& b);

  double evaluate(const FeatureTriple& f) const;
  const std::vector<Node>& nodes() const { return nodes_; }
  std::size_t subtree_end(std::size_t i) const;
  std::size_t depth() const;

  // S-expression: (+ x2 (* -0.5 x1))
  std::string to_string() const;
  static FitnessExpression parse(std::string_view text);
  std::string serialize() const;
  static FitnessExpression deserialize(std::string_view text);
  static FitnessExpression load(const std::string& path);

  friend bool operator==(const FitnessExpression&, const FitnessExpression&) = default;

 private:
  std::vector<Node> nodes_;
};

inline constexpr std::array<double, 6> kFitnessConstants{-2, -1, -0.5, 0.5, 1, 2};

// Feature triples of one training sentence, best first.  Entries sharing a
// tier are ties in the ideal order and form no training pair.
struct RankedExample {
  std::vector<FeatureTriple> entries;
  std::vector<std::size_t> tier;  // empty: every entry its own tier
};

// Fraction of ordered within-example pairs that f keeps in order.  Pairs
// with identical triples or a shared tier are excluded; no pairs gives 1.
double pairwise_accuracy(const FitnessExpression& f, std::span<const RankedExample> examples);

FitnessExpression train_fitness(std::span<const RankedExample> examples, const GpParams& params);

// Indices of hypotheses ordered by f1 against gold (descending), then fewer
// operations; stable otherwise.
std::vector<std::size_t> ideal_rank(std::span<const Hypothesis> hypotheses, const FeatureStructure& gold);

}  // namespace rose
