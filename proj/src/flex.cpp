#include "rose/flex.hpp"

#include <algorithm>
#include <tuple>

#include "gss_engine.hpp"
#include "rose/error.hpp"

namespace rose {

namespace {

std::vector<std::vector<LexicalEntry>> readings_of(const Grammar& g, std::span<const std::string> tokens) {
  std::vector<std::vector<LexicalEntry>> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(g.lookup(t));
  return out;
}

detail::EngineConfig engine_config(const FlexConfig& config) {
  detail::EngineConfig e;
  e.beam_width = config.beam_width;
  e.packing = config.packing;
  e.spec = config.spec;
  e.trace = config.trace;
  return e;
}

}  // namespace

std::string_view to_string(FlexMode mode) {
  switch (mode) {
    case FlexMode::FullParse: return "full-parse";
    case FlexMode::Skip: return "skip";
    case FlexMode::Restarts: return "restarts";
    case FlexMode::Mdp: return "mdp";
  }
  return "?";
}

FlexMode parse_flex_mode(std::string_view text) {
  for (auto m : {FlexMode::FullParse, FlexMode::Skip, FlexMode::Restarts, FlexMode::Mdp})
    if (text == to_string(m)) return m;
  throw Error(ErrorCode::InvalidArgument, "unknown mode: " + std::string(text));
}

std::vector<Analysis> skip_parse(const ParseTable& table, std::span<const std::string> tokens,
                                 const FlexConfig& config) {
  auto readings = readings_of(table.grammar(), tokens);
  auto e = engine_config(config);
  e.allow_skip = true;
  e.max_penalty = detail::kUnbounded - 1;
  return detail::GssEngine(table, e).run(readings).analyses;
}

std::vector<Analysis> mdp_parse(const ParseTable& table, std::span<const std::string> tokens,
                                const FlexConfig& config) {
  auto readings = readings_of(table.grammar(), tokens);
  auto e = engine_config(config);
  e.allow_skip = true;
  e.allow_insert = true;
  e.max_penalty = config.max_penalty;
  return detail::GssEngine(table, e).run(readings).analyses;
}

ChunkSet restarts_parse(const ParseTable& chunk_table, std::span<const std::string> tokens,
                        const FlexConfig& config) {
  auto readings = readings_of(chunk_table.grammar(), tokens);
  auto e = engine_config(config);
  e.accept_everywhere = true;
  detail::GssEngine engine(chunk_table, e);

  ChunkSet out;
  out.token_count = tokens.size();
  std::size_t pos = 0;
  while (pos < tokens.size()) {
    auto result = engine.run(readings, pos);
    std::optional<Analysis> chunk;
    for (std::size_t end = tokens.size(); end > pos && !chunk; --end) {
      for (auto& a : result.accepted_at[end]) {
        if (!a.structure()) continue;
        // Largest structure wins; analyses arrive in signature order, so a
        // strict comparison keeps the lowest signature among equals.
        if (!chunk || size(**a.structure()) > size(**chunk->structure())) chunk = a;
      }
    }
    if (chunk) {
      pos = chunk->end;
      out.chunks.push_back(std::move(*chunk));
    } else {
      out.uncovered.push_back(pos++);
    }
  }
  return out;
}

std::optional<Analysis> select_best(std::span<const Analysis> analyses) {
  const Analysis* best = nullptr;
  for (const auto& a : analyses) {
    if (!best) {
      best = &a;
      continue;
    }
    auto rank = [](const Analysis& x) {
      return std::tuple(x.deviation_penalty, -static_cast<long long>(x.covered()), x.inserted.size());
    };
    auto ra = rank(a), rb = rank(*best);
    if (ra < rb || (ra == rb && a.signature < best->signature)) best = &a;
  }
  if (!best) return std::nullopt;
  return *best;
}

RobustParser::RobustParser(std::shared_ptr<const Grammar> grammar, std::shared_ptr<const InterlinguaSpec> spec)
    : grammar_(grammar),
      spec_(std::move(spec)),
      table_(compile_tables(grammar, TableStart::Grammar)),
      chunk_table_(compile_tables(grammar, TableStart::AnyCategory)) {}

std::vector<Analysis> RobustParser::parse(std::span<const std::string> tokens, FlexConfig config) const {
  if (!config.spec) config.spec = spec_.get();
  switch (config.mode) {
    case FlexMode::FullParse: {
      GlrOptions o;
      o.packing = config.packing;
      o.spec = config.spec;
      o.trace = config.trace;
      return glr_parse(table_, tokens, o);
    }
    case FlexMode::Skip: return skip_parse(table_, tokens, config);
    case FlexMode::Mdp: return mdp_parse(table_, tokens, config);
    case FlexMode::Restarts: return restarts_parse(chunk_table_, tokens, config).chunks;
  }
  return {};
}

ChunkSet RobustParser::chunks(std::span<const std::string> tokens, FlexConfig config) const {
  if (!config.spec) config.spec = spec_.get();
  return restarts_parse(chunk_table_, tokens, config);
}

}  // namespace rose
