#include "rose/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "rose/error.hpp"
#include "rose/text_util.hpp"

namespace rose {

// ---- corpus files ----

std::vector<CorpusEntry> parse_corpus(std::string_view text, const InterlinguaSpec& spec) {
  std::vector<CorpusEntry> out;
  std::size_t line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() != 3) throw Error(ErrorCode::Syntax, "corpus line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    CorpusEntry e;
    e.id = std::string(trim(fields[0]));
    for (auto t : split_ws(fields[1])) e.tokens.emplace_back(t);
    if (e.tokens.empty()) throw Error(ErrorCode::Syntax, "corpus line " + std::to_string(line_no) + ": no tokens");
    e.gold = parse_fs(trim(fields[2]));
    if (!is_valid(*e.gold, spec))
      throw Error(ErrorCode::SpecViolation, "corpus line " + std::to_string(line_no) + ": gold rejected by the spec");
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusEntry> load_corpus(const std::string& path, const InterlinguaSpec& spec) {
  return parse_corpus(read_file(path), spec);
}

std::string serialize_corpus(const std::vector<CorpusEntry>& corpus, const InterlinguaSpec& spec) {
  std::ostringstream os;
  for (const auto& e : corpus) {
    os << e.id << '\t';
    for (std::size_t i = 0; i < e.tokens.size(); ++i) os << (i ? " " : "") << e.tokens[i];
    os << '\t' << to_literal(*e.gold, spec) << '\n';
  }
  return os.str();
}

// ---- grading ----

const char* to_string(Bucket b) {
  switch (b) {
    case Bucket::Nil: return "NIL";
    case Bucket::Bad: return "Bad";
    case Bucket::Partial: return "Partial";
    case Bucket::Okay: return "Okay";
    case Bucket::Perfect: return "Perfect";
  }
  return "?";
}

Bucket grade(const FsPtr& result, const FeatureStructure& gold) {
  if (!result) return Bucket::Nil;
  const Similarity s = similarity(*result, gold);
  if (s.precision == 1.0 && s.recall == 1.0) return Bucket::Perfect;
  if (s.recall == 1.0) return Bucket::Okay;
  if (s.precision == 1.0 && s.recall > 0.0) return Bucket::Partial;
  return Bucket::Bad;
}

// ---- strategies ----

std::vector<StrategyConfig> paper_strategies() {
  return {strategy_from_label("MDP1"), strategy_from_label("MDP3"), strategy_from_label("MDP5"),
          strategy_from_label("restarts"), strategy_from_label("restarts+repair")};
}

StrategyConfig strategy_from_label(std::string_view label) {
  std::string lower(label);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  StrategyConfig s;
  if (lower.starts_with("mdp") && lower.size() > 3 &&
      std::all_of(lower.begin() + 3, lower.end(), [](unsigned char c) { return std::isdigit(c); })) {
    s.flex.mode = FlexMode::Mdp;
    s.flex.max_penalty = std::stoul(lower.substr(3));
    s.label = "MDP" + lower.substr(3);
    return s;
  }
  if (lower == "restarts" || lower == "restarts+repair") {
    s.flex.mode = FlexMode::Restarts;
    s.repair = lower == "restarts+repair";
    s.label = lower;
    return s;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown strategy: " + std::string(label));
}

namespace {

FsPtr largest_chunk(const ChunkSet& chunks) {
  FsPtr best;
  for (const auto& fs : chunk_structures(chunks))
    if (!best || size(*fs) > size(*best)) best = fs;
  return best;
}

SentenceResult run_one(const CorpusEntry& entry, const RobustParser& parser, const StrategyConfig& strategy,
                       const TrainedArtifacts& artifacts) {
  SentenceResult r;
  r.id = entry.id;
  r.tokens = entry.tokens.size();
  const auto start = std::chrono::steady_clock::now();
  try {
    if (strategy.flex.mode == FlexMode::Restarts) {
      ChunkSet chunks = parser.chunks(entry.tokens, strategy.flex);
      r.chunk_count = chunks.chunks.size();
      if (strategy.repair && needs_repair(chunks)) {
        auto structures = chunk_structures(chunks);
        if (!structures.empty()) {
          auto hyps = evolve(structures, *parser.spec(), artifacts.fitness, artifacts.stats, artifacts.gp);
          r.result = hyps.front().result;
          r.repaired = true;
        }
      } else {
        r.result = largest_chunk(chunks);
      }
    } else {
      auto analyses = parser.parse(entry.tokens, strategy.flex);
      if (auto best = select_best(analyses))
        if (const FsPtr* fs = best->structure()) r.result = *fs;
    }
  } catch (const Error&) {
    r.result = nullptr;
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.bucket = grade(r.result, *entry.gold);
  return r;
}

}  // namespace

StrategyReport run_strategy(const std::vector<CorpusEntry>& corpus, const RobustParser& parser,
                            const StrategyConfig& strategy, const TrainedArtifacts& artifacts) {
  if (strategy.repair && !parser.spec()) throw Error(ErrorCode::InvalidArgument, "repair needs an interlingua spec");
  StrategyReport report;
  report.label = strategy.label;
  report.sentences.reserve(corpus.size());
  for (const auto& entry : corpus) report.sentences.push_back(run_one(entry, parser, strategy, artifacts));
  return report;
}

std::array<std::size_t, 5> StrategyReport::counts() const {
  std::array<std::size_t, 5> c{};
  for (const auto& s : sentences) ++c[static_cast<std::size_t>(s.bucket)];
  return c;
}

double StrategyReport::percent(Bucket b) const {
  if (sentences.empty()) return 0.0;
  return 100.0 * static_cast<double>(counts()[static_cast<std::size_t>(b)]) / static_cast<double>(sentences.size());
}

double StrategyReport::total_seconds() const {
  double t = 0;
  for (const auto& s : sentences) t += s.seconds;
  return t;
}

double StrategyReport::mean_seconds() const {
  return sentences.empty() ? 0.0 : total_seconds() / static_cast<double>(sentences.size());
}

// ---- reports ----

std::string quality_csv(const std::vector<StrategyReport>& reports) {
  std::ostringstream os;
  os << "strategy,sentences";
  for (auto b : kBuckets) os << ',' << to_string(b);
  os << '\n';
  char buf[32];
  for (const auto& r : reports) {
    os << r.label << ',' << r.sentences.size();
    for (auto b : kBuckets) {
      std::snprintf(buf, sizeof buf, "%.1f", r.percent(b));
      os << ',' << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::string timing_csv(const std::vector<StrategyReport>& reports) {
  std::ostringstream os;
  os << "strategy,index,id,tokens,seconds\n";
  char buf[32];
  for (const auto& r : reports)
    for (std::size_t i = 0; i < r.sentences.size(); ++i) {
      const auto& s = r.sentences[i];
      std::snprintf(buf, sizeof buf, "%.6f", s.seconds);
      os << r.label << ',' << i << ',' << s.id << ',' << s.tokens << ',' << buf << '\n';
    }
  return os.str();
}

void emit_report(const std::vector<StrategyReport>& reports, const std::string& out_dir) {
  const bool any = std::any_of(reports.begin(), reports.end(), [](const StrategyReport& r) { return !r.sentences.empty(); });
  if (!any) throw Error(ErrorCode::EmptyCorpus, "nothing to report: the corpus is empty");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + out_dir + ": " + ec.message());
  // Write both files under temporary names first so a failure leaves no
  // half-written report behind.
  const fs::path dir(out_dir);
  const std::pair<const char*, std::string> files[] = {{"quality.csv", quality_csv(reports)},
                                                       {"timing.csv", timing_csv(reports)}};
  for (const auto& [name, body] : files) write_file((dir / (std::string(name) + ".tmp")).string(), body);
  for (const auto& [name, body] : files) {
    fs::rename(dir / (std::string(name) + ".tmp"), dir / name, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot write " + (dir / name).string() + ": " + ec.message());
  }
}

// ---- corpus generation ----

namespace {

const std::vector<std::string> kForeignWords = {"uh", "um", "wipes", "well", "like", "okay", "hmm", "actually"};

class Sampler {
 public:
  Sampler(const Grammar& g, std::mt19937_64& rng) : g_(g), rng_(rng), words_(g.symbol_count()), rules_(g.symbol_count()) {
    for (const auto& [word, entries] : g.lexicon())
      for (const auto& e : entries) words_[e.category].push_back(word);
    for (std::uint32_t r = 0; r < g.rules().size(); ++r) rules_[g.rule(r).lhs].push_back(r);
  }

  void expand(SymbolId s, std::size_t depth, std::size_t max_depth, std::vector<std::string>& out) {
    if (g_.is_terminal(s)) {
      const auto& w = words_[s];
      out.push_back(w.empty() ? g_.name(s) : w[pick(w.size())]);
      return;
    }
    const auto& candidates = rules_[s];
    std::uint32_t rule = candidates[pick(candidates.size())];
    if (depth >= max_depth) {
      // Past the depth budget, take the cheapest rule to terminate.
      std::size_t best = SIZE_MAX;
      for (auto r : candidates) {
        std::size_t y = 0;
        for (auto sym : g_.rule(r).rhs) y += g_.is_terminal(sym) ? 1 : g_.min_yield_of(sym).value_or(SIZE_MAX / 64);
        if (y < best) {
          best = y;
          rule = r;
        }
      }
    }
    for (auto sym : g_.rule(rule).rhs) expand(sym, depth + 1, max_depth, out);
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  const Grammar& g_;
  std::mt19937_64& rng_;
  std::vector<std::vector<std::string>> words_;
  std::vector<std::vector<std::uint32_t>> rules_;
};

}  // namespace

std::vector<CorpusEntry> generate_corpus(const Grammar& grammar, const InterlinguaSpec& spec, const GenConfig& config) {
  std::mt19937_64 rng(config.seed);
  Sampler sampler(grammar, rng);
  const ParseTable table = compile_tables(std::make_shared<const Grammar>(grammar));
  std::vector<std::string> vocabulary;
  for (const auto& [word, entries] : grammar.lexicon()) vocabulary.push_back(word);
  auto chance = [&](double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; };

  std::vector<CorpusEntry> out;
  std::size_t attempts = 0;
  while (out.size() < config.sentences) {
    if (++attempts > config.sentences * 200 + 1000)
      throw Error(ErrorCode::InvalidArgument, "grammar yields too few usable sentences");
    std::vector<std::string> tokens;
    sampler.expand(grammar.start(), 0, config.max_depth, tokens);
    if (tokens.empty() || tokens.size() > config.max_tokens) continue;
    GlrOptions options;
    options.spec = &spec;
    auto analyses = glr_parse(table, tokens, options);
    auto best = select_best(analyses);
    if (!best || !best->structure()) continue;

    CorpusEntry e;
    char id[32];
    std::snprintf(id, sizeof id, "s%04zu", out.size() + 1);
    e.id = id;
    e.gold = *best->structure();
    for (const auto& t : tokens) {
      if (chance(config.insert_rate) && !vocabulary.empty()) e.tokens.push_back(vocabulary[sampler.pick(vocabulary.size())]);
      if (chance(config.foreign_rate)) e.tokens.push_back(kForeignWords[sampler.pick(kForeignWords.size())]);
      if (!chance(config.delete_rate)) e.tokens.push_back(t);
    }
    if (e.tokens.empty()) e.tokens = tokens;
    out.push_back(std::move(e));
  }
  return out;
}

SyntheticDomain synthesize_domain(std::size_t min_rules, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };
  constexpr std::size_t kLevels = 4;
  constexpr std::size_t kRulesPerSymbol = 5;
  constexpr std::size_t kTerminals = 16;
  const std::size_t per_level = std::max<std::size_t>(2, (min_rules + kLevels * kRulesPerSymbol - 1) / (kLevels * kRulesPerSymbol));

  auto nt = [](std::size_t level, std::size_t i) { return "N" + std::to_string(level) + "_" + std::to_string(i); };
  auto frame = [&](std::size_t level, std::size_t i) { return "*" + nt(level, i); };

  std::ostringstream g;
  g << "%start S\n%terminal";
  for (std::size_t t = 0; t < kTerminals; ++t) g << " T" << t;
  g << '\n';
  for (std::size_t i = 0; i < per_level; ++i) g << "S -> " << nt(0, i) << '\n';
  for (std::size_t level = 0; level < kLevels; ++level) {
    for (std::size_t i = 0; i < per_level; ++i) {
      for (std::size_t r = 0; r < kRulesPerSymbol; ++r) {
        const std::size_t len = 1 + pick(3);
        g << nt(level, i) << " ->";
        for (std::size_t k = 0; k < len; ++k) {
          // Bottom level: terminals only.  Elsewhere one symbol in three is
          // a terminal, which keeps sentences short.
          const bool terminal = level + 1 == kLevels || pick(3) == 0;
          if (terminal) g << " T" << pick(kTerminals);
          else g << ' ' << nt(level + 1, pick(per_level));
        }
        g << " : frame(" << frame(level, i);
        for (std::size_t k = 0; k < len; ++k) g << ", A" << (k + 1) << "=$" << (k + 1);
        g << ")\n";
      }
    }
  }
  for (std::size_t t = 0; t < kTerminals; ++t)
    for (char c : {'a', 'b', 'c'}) g << 'w' << t << c << " :: T" << t << " : W" << t << static_cast<char>(c - 32) << '\n';

  std::ostringstream s;
  s << "type ANY :";
  for (std::size_t level = 0; level < kLevels; ++level)
    for (std::size_t i = 0; i < per_level; ++i) s << ' ' << frame(level, i);
  s << '\n';
  for (std::size_t level = 0; level < kLevels; ++level)
    for (std::size_t i = 0; i < per_level; ++i) s << "frame " << frame(level, i) << " : A1 A2 A3\n";
  for (int k = 1; k <= 3; ++k) s << "slot A" << k << " : ANY @symbol\n";
  return {g.str(), s.str()};
}

// ---- training examples ----

std::vector<RankedExample> build_ranked_examples(const std::vector<CorpusEntry>& corpus, const RobustParser& parser,
                                                 const StatModel& stats, std::size_t max_chunks) {
  if (!parser.spec()) throw Error(ErrorCode::InvalidArgument, "ranked examples need an interlingua spec");
  const InterlinguaSpec& spec = *parser.spec();
  std::vector<RankedExample> out;
  std::map<std::size_t, std::vector<RepairProgram>> programs;
  for (const auto& entry : corpus) {
    auto chunks = chunk_structures(parser.chunks(entry.tokens));
    if (chunks.size() < 2 || chunks.size() > max_chunks) continue;
    auto& progs = programs[chunks.size()];
    if (progs.empty()) progs = enumerate_programs(chunks.size(), chunks.size() - 1);

    std::vector<Hypothesis> hyps;
    for (const auto& p : progs) {
      Hypothesis h = eval_program(p, chunks, spec, &stats);
      auto same = std::find_if(hyps.begin(), hyps.end(), [&](const Hypothesis& o) { return *o.result == *h.result; });
      if (same == hyps.end()) hyps.push_back(std::move(h));
      else if (h.program.n_ops() < same->program.n_ops()) *same = std::move(h);
    }
    if (hyps.size() < 2) continue;
    const auto order = ideal_rank(hyps, *entry.gold);
    RankedExample ex;
    std::vector<std::pair<double, std::size_t>> keys;
    for (auto i : order) {
      ex.entries.push_back(score_features(hyps[i], stats));
      keys.emplace_back(similarity(*hyps[i].result, *entry.gold).f1, hyps[i].program.n_ops());
    }
    for (std::size_t i = 0; i < keys.size(); ++i)
      ex.tier.push_back(i > 0 && keys[i] == keys[i - 1] ? ex.tier.back() : i);
    out.push_back(std::move(ex));
  }
  return out;
}

}  // namespace rose
