#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rose/fitness.hpp"
#include "rose/flex.hpp"
#include "rose/program.hpp"

namespace rose {

// False only when one chunk covers every token.
bool needs_repair(const ChunkSet& chunks);

// Structure values of the chunks, in span order.
std::vector<FsPtr> chunk_structures(const ChunkSet& chunks);

// Bottom-up MY-COMB evaluation: insert the right operand into a slot of the
// left, else merge, else keep the larger (left on ties).
Hypothesis eval_program(const RepairProgram& program, std::span<const FsPtr> chunks, const InterlinguaSpec& spec,
                        const StatModel* stats = nullptr);

struct GenerationStats {
  std::size_t generation = 0;  // generations completed
  std::size_t since_improvement = 0;
};

enum class Continue { Yes, Stop };
Continue stopping_rule(const GenerationStats& g, const GpParams& params);

// GP over repair programs.  Returns distinct results of the final
// population, best first.
std::vector<Hypothesis> evolve(std::span<const FsPtr> chunks, const InterlinguaSpec& spec,
                               const FitnessExpression& fitness, const StatModel& stats, const GpParams& params);

// Every program over the chunks with depth <= max_depth, leaves distinct.
// Exponential; meant for small inputs (oracles, training data).
std::vector<RepairProgram> enumerate_programs(std::size_t chunk_count, std::size_t max_depth);

}  // namespace rose
