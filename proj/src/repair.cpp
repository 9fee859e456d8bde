#include "rose/repair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "rose/error.hpp"

namespace rose {

bool needs_repair(const ChunkSet& chunks) {
  if (chunks.chunks.size() != 1 || !chunks.uncovered.empty()) return true;
  const auto& c = chunks.chunks.front();
  return !(c.begin == 0 && c.end == chunks.token_count && c.skipped.empty());
}

std::vector<FsPtr> chunk_structures(const ChunkSet& chunks) {
  std::vector<FsPtr> out;
  for (const auto& c : chunks.chunks)
    if (const FsPtr* fs = c.structure(); fs && *fs) out.push_back(*fs);
  return out;
}

namespace {

class Evaluator {
 public:
  Evaluator(std::span<const FsPtr> chunks, const InterlinguaSpec& spec, const StatModel* stats, Hypothesis& h)
      : chunks_(chunks), spec_(spec), stats_(stats), h_(h) {}

  FsPtr eval() {
    const auto& n = h_.program.nodes()[i_++];
    if (!n.comb) return chunks_[n.chunk];
    const std::size_t slot_index = h_.slots.size();
    h_.slots.emplace_back("??");
    FsPtr left = eval();
    FsPtr right = eval();

    RepairStep step;
    step.parent_frame = left->frame();
    step.child_frame = right->frame();
    step.child_type = spec_.type_of(right->frame());
    step.slot = "??";
    if (auto ins = insert(*left, right, spec_, stats_)) {
      step.kind = RepairKind::Insert;
      step.slot = ins->slot;
      step.mi = stats_ ? stats_->mi(ins->slot, step.child_type) : 0.0;
      h_.slots[slot_index] = ins->slot;
      h_.trace.push_back(std::move(step));
      return ins->result;
    }
    if (auto merged = merge(left, right, spec_)) {
      step.kind = RepairKind::Merge;
      h_.trace.push_back(std::move(step));
      return *merged;
    }
    step.kind = RepairKind::FallbackLargest;
    h_.trace.push_back(std::move(step));
    return size(*right) > size(*left) ? right : left;
  }

 private:
  std::span<const FsPtr> chunks_;
  const InterlinguaSpec& spec_;
  const StatModel* stats_;
  Hypothesis& h_;
  std::size_t i_ = 0;
};

}  // namespace

Hypothesis eval_program(const RepairProgram& program, std::span<const FsPtr> chunks, const InterlinguaSpec& spec,
                        const StatModel* stats) {
  if (!program.valid(chunks.size())) throw Error(ErrorCode::InvalidArgument, "malformed repair program " + program.key());
  Hypothesis h;
  h.program = program;
  h.result = Evaluator(chunks, spec, stats, h).eval();
  return h;
}

Continue stopping_rule(const GenerationStats& g, const GpParams& params) {
  if (g.generation >= params.generations) return Continue::Stop;
  if (g.since_improvement >= params.patience) return Continue::Stop;
  return Continue::Yes;
}

namespace {

class ProgramGp {
 public:
  ProgramGp(std::span<const FsPtr> chunks, const InterlinguaSpec& spec, const FitnessExpression& fitness,
            const StatModel& stats, const GpParams& params)
      : chunks_(chunks), spec_(spec), fitness_(fitness), stats_(stats), params_(params), rng_(params.seed) {}

  std::vector<Hypothesis> run() {
    std::vector<const Hypothesis*> pop;
    pop.reserve(params_.population);
    while (pop.size() < params_.population) {
      std::vector<std::uint32_t> all(chunks_.size());
      for (std::uint32_t i = 0; i < all.size(); ++i) all[i] = i;
      pop.push_back(&score(random_program(all)));
    }
    sort(pop);

    GenerationStats g{1, 0};
    const Hypothesis* best = pop.front();
    while (stopping_rule(g, params_) == Continue::Yes) {
      std::vector<const Hypothesis*> next(pop.begin(), pop.begin() + static_cast<std::ptrdiff_t>(params_.elites));
      while (next.size() < params_.population) {
        RepairProgram child = tournament(pop)->program;
        if (chance(params_.crossover_rate)) child = crossover(child, tournament(pop)->program);
        if (chance(params_.mutation_rate)) child = mutate(child);
        next.push_back(&score(child));
      }
      pop = std::move(next);
      sort(pop);
      ++g.generation;
      if (better(pop.front(), best)) {
        best = pop.front();
        g.since_improvement = 0;
      } else {
        ++g.since_improvement;
      }
    }

    std::vector<Hypothesis> out;
    for (const Hypothesis* h : pop) {
      bool seen = std::any_of(out.begin(), out.end(), [&](const Hypothesis& o) { return *o.result == *h->result; });
      if (!seen) out.push_back(*h);
    }
    return out;
  }

 private:
  const Hypothesis& score(const RepairProgram& p) {
    auto key = p.key();
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    Hypothesis h = eval_program(p, chunks_, spec_, &stats_);
    h.fitness = fitness_.evaluate(score_features(h, stats_));
    if (std::isnan(h.fitness)) h.fitness = -std::numeric_limits<double>::infinity();
    keys_.emplace(&cache_.emplace(key, std::move(h)).first->second, key);
    return cache_.at(key);
  }

  bool better(const Hypothesis* a, const Hypothesis* b) const {
    if (a->fitness != b->fitness) return a->fitness > b->fitness;
    if (a->program.n_ops() != b->program.n_ops()) return a->program.n_ops() < b->program.n_ops();
    return keys_.at(a) < keys_.at(b);
  }
  void sort(std::vector<const Hypothesis*>& pop) const {
    std::stable_sort(pop.begin(), pop.end(), [&](const Hypothesis* a, const Hypothesis* b) { return better(a, b); });
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
  bool chance(double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p; }

  RepairProgram shape(std::span<const std::uint32_t> leaves) {
    if (leaves.size() == 1) return RepairProgram::leaf(leaves[0]);
    const std::size_t split = 1 + pick(leaves.size() - 1);
    return RepairProgram::comb(shape(leaves.first(split)), shape(leaves.subspan(split)));
  }

  RepairProgram balanced(std::span<const std::uint32_t> leaves) {
    if (leaves.size() == 1) return RepairProgram::leaf(leaves[0]);
    const std::size_t split = leaves.size() / 2;
    return RepairProgram::comb(balanced(leaves.first(split)), balanced(leaves.subspan(split)));
  }

  // Random subset of the available chunks in random order, random shape.
  RepairProgram random_program(std::vector<std::uint32_t> available, std::size_t max_depth = SIZE_MAX) {
    max_depth = std::min(max_depth, params_.max_depth);
    std::shuffle(available.begin(), available.end(), rng_);
    std::size_t k = 1 + pick(available.size());
    k = std::min<std::size_t>(k, std::size_t{1} << std::min<std::size_t>(max_depth, 20));
    std::span<const std::uint32_t> leaves(available.data(), k);
    for (int attempt = 0; attempt < 8; ++attempt) {
      RepairProgram p = shape(leaves);
      if (p.depth() <= max_depth) return p;
    }
    return balanced(leaves);
  }

  bool acceptable(const RepairProgram& p) const { return p.valid(chunks_.size()) && p.depth() <= params_.max_depth; }

  RepairProgram crossover(const RepairProgram& a, const RepairProgram& b) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      RepairProgram child = a.replace_subtree(pick(a.nodes().size()), b.subtree(pick(b.nodes().size())));
      if (acceptable(child)) return child;
    }
    return a;
  }

  RepairProgram mutate(const RepairProgram& a) {
    const auto& nodes = a.nodes();
    if (a.n_ops() > 0 && chance(0.5)) {
      // Swap the arguments of one MY-COMB node.
      std::vector<std::size_t> combs;
      for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].comb) combs.push_back(i);
      const std::size_t at = combs[pick(combs.size())];
      const std::size_t mid = a.subtree_end(at + 1);
      const RepairProgram swapped = RepairProgram::comb(a.subtree(mid), a.subtree(at + 1));
      return a.replace_subtree(at, swapped);
    }
    const std::size_t at = pick(nodes.size());
    std::vector<bool> used(chunks_.size(), false);
    const std::size_t end = a.subtree_end(at);
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (!nodes[i].comb && (i < at || i >= end)) used[nodes[i].chunk] = true;
    std::vector<std::uint32_t> available;
    for (std::uint32_t c = 0; c < chunks_.size(); ++c)
      if (!used[c]) available.push_back(c);
    if (available.empty()) return a;
    RepairProgram child = a.replace_subtree(at, random_program(available));
    return acceptable(child) ? child : a;
  }

  const Hypothesis* tournament(const std::vector<const Hypothesis*>& pop) {
    const Hypothesis* best = pop[pick(pop.size())];
    for (std::size_t k = 1; k < params_.tournament; ++k) {
      const Hypothesis* c = pop[pick(pop.size())];
      if (better(c, best)) best = c;
    }
    return best;
  }

  std::span<const FsPtr> chunks_;
  const InterlinguaSpec& spec_;
  const FitnessExpression& fitness_;
  const StatModel& stats_;
  GpParams params_;
  std::mt19937_64 rng_;
  std::unordered_map<std::string, Hypothesis> cache_;
  std::unordered_map<const Hypothesis*, std::string> keys_;
};

void enumerate_into(std::vector<bool>& used, std::size_t depth, std::vector<RepairProgram>& out) {
  for (std::uint32_t c = 0; c < used.size(); ++c)
    if (!used[c]) out.push_back(RepairProgram::leaf(c));
  if (depth == 0) return;
  std::vector<RepairProgram> lefts;
  enumerate_into(used, depth - 1, lefts);
  for (const auto& l : lefts) {
    const auto leaves = l.leaves();
    if (leaves.size() == static_cast<std::size_t>(std::count(used.begin(), used.end(), false))) continue;
    for (auto c : leaves) used[c] = true;
    std::vector<RepairProgram> rights;
    enumerate_into(used, depth - 1, rights);
    for (auto c : leaves) used[c] = false;
    for (const auto& r : rights) out.push_back(RepairProgram::comb(l, r));
  }
}

}  // namespace

std::vector<Hypothesis> evolve(std::span<const FsPtr> chunks, const InterlinguaSpec& spec,
                               const FitnessExpression& fitness, const StatModel& stats, const GpParams& params) {
  params.check();
  if (chunks.empty()) throw Error(ErrorCode::InvalidArgument, "evolve needs at least one chunk");
  return ProgramGp(chunks, spec, fitness, stats, params).run();
}

std::vector<RepairProgram> enumerate_programs(std::size_t chunk_count, std::size_t max_depth) {
  std::vector<bool> used(chunk_count, false);
  std::vector<RepairProgram> out;
  enumerate_into(used, max_depth, out);
  return out;
}

}  // namespace rose
