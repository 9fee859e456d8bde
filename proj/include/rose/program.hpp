#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rose/interlingua.hpp"

namespace rose {

// Binary MY-COMB tree over chunk indices, stored in prefix order.
class RepairProgram {
 public:
  struct Node {
    bool comb = false;
    std::uint32_t chunk = 0;  // leaves only

    friend bool operator==(const Node&, const Node&) = default;
  };

  RepairProgram() = default;
  explicit RepairProgram(std::vector<Node> nodes) : nodes_(std::move(nodes)) {}
  static RepairProgram leaf(std::uint32_t chunk);
  static RepairProgram comb(const RepairProgram& left, const RepairProgram& right);

  const std::vector<Node>& nodes() const { return nodes_; }
  bool empty() const { return nodes_.empty(); }

  // Index one past the subtree rooted at i.
  std::size_t subtree_end(std::size_t i) const;
  RepairProgram subtree(std::size_t i) const;
  RepairProgram replace_subtree(std::size_t i, const RepairProgram& with) const;

  // Leaves have depth 0.
  std::size_t depth() const;
  std::size_t n_ops() const;
  std::vector<std::uint32_t> leaves() const;
  // Well formed, every chunk index < chunk_count and used at most once.
  bool valid(std::size_t chunk_count) const;

  // Compact key: "(C 1 (C 0 3))" style, chunks by index.
  std::string key() const;

  friend bool operator==(const RepairProgram&, const RepairProgram&) = default;

 private:
  std::vector<Node> nodes_;
};

enum class RepairKind { Insert, Merge, FallbackLargest };
const char* to_string(RepairKind kind);

struct RepairStep {
  std::string parent_frame;
  std::string child_frame;
  std::string child_type;
  std::string slot;  // "??" unless an insert happened
  double mi = 0.0;
  RepairKind kind = RepairKind::Insert;
};

struct Hypothesis {
  RepairProgram program;
  // Slot bound at each MY-COMB node, in prefix order; "??" when unbound.
  std::vector<std::string> slots;
  FsPtr result;
  std::vector<RepairStep> trace;
  double fitness = 0.0;
};

// Figure 2 layout: nested (MY-COMB arg1 arg2 SLOT) with chunk literals.
std::string format_hypothesis(const Hypothesis& h, const std::vector<FsPtr>& chunks, const InterlinguaSpec& spec);

struct GpParams {
  std::size_t population = 50;
  std::size_t generations = 20;
  double crossover_rate = 0.9;
  double mutation_rate = 0.1;
  std::size_t tournament = 4;
  std::size_t elites = 2;
  std::size_t max_depth = 6;
  std::size_t patience = 5;
  std::uint64_t seed = 1;

  // Throws invalid-argument on rates outside [0,1] or zero sizes.
  void check() const;
};

}  // namespace rose
