// rose: command-line front end for the robust parser, repair stage and
// benchmark harness.  Every subcommand also reads its options from an INI
// or TOML file given with --config.

#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rose/error.hpp"
#include "rose/harness.hpp"
#include "rose/text_util.hpp"

namespace {

using namespace rose;

struct Common {
  std::string grammar = "data/scheduling/grammar.txt";
  std::string spec = "data/scheduling/spec.txt";
  std::string stats_file = "data/scheduling/stats.txt";
  std::string fitness_file = "data/scheduling/fitness.txt";
  GpParams gp;
};

void add_domain(CLI::App* cmd, Common& c, bool artifacts) {
  cmd->add_option("--grammar", c.grammar, "grammar file")->capture_default_str();
  cmd->add_option("--spec", c.spec, "interlingua spec file")->capture_default_str();
  if (artifacts) {
    cmd->add_option("--stats-file", c.stats_file, "trained slot statistics")->capture_default_str();
    cmd->add_option("--fitness-file", c.fitness_file, "trained fitness expression")->capture_default_str();
  }
}

void add_gp(CLI::App* cmd, GpParams& gp) {
  cmd->add_option("--seed", gp.seed, "random seed")->capture_default_str();
  cmd->add_option("--population", gp.population, "GP population size")->capture_default_str();
  cmd->add_option("--generations", gp.generations, "GP generation limit")->capture_default_str();
  cmd->add_option("--patience", gp.patience, "generations without improvement before stopping")->capture_default_str();
  cmd->add_option("--max-depth", gp.max_depth, "GP tree depth limit")->capture_default_str();
}

std::shared_ptr<const Grammar> load_g(const Common& c) { return std::make_shared<const Grammar>(Grammar::load(c.grammar)); }
std::shared_ptr<const InterlinguaSpec> load_s(const Common& c) {
  return std::make_shared<const InterlinguaSpec>(InterlinguaSpec::load(c.spec));
}
TrainedArtifacts load_artifacts(const Common& c) {
  return {StatModel::load(c.stats_file), FitnessExpression::load(c.fitness_file), c.gp};
}

void print_analysis(const Analysis& a, const InterlinguaSpec& spec) {
  std::cout << "[" << a.begin << "," << a.end << ") " << a.category << " penalty " << a.deviation_penalty;
  if (!a.skipped.empty()) {
    std::cout << " skipped";
    for (auto s : a.skipped) std::cout << ' ' << s;
  }
  for (const auto& ins : a.inserted) std::cout << " +" << ins.nonterminal << "/" << ins.penalty;
  std::cout << "\n  " << to_literal(a.value, spec) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rose: robust parsing with partial parses and genetic-programming repair"};
  app.set_config("--config", "", "read options from an INI/TOML file");
  app.require_subcommand(1);

  // compile
  Common compile_c;
  std::string table_out;
  bool chunk_table = false;
  auto* compile = app.add_subcommand("compile", "compile a grammar into an SLR table");
  add_domain(compile, compile_c, false);
  compile->add_option("--out,-o", table_out, "table file (stdout when absent)");
  compile->add_flag("--chunk", chunk_table, "table accepting any category (restarts mode)");

  // parse
  Common parse_c;
  std::string mode = "mdp";
  std::size_t max_penalty = 1;
  std::size_t beam = 256;
  bool repair = false;
  bool trace = false;
  std::vector<std::string> words;
  auto* parse = app.add_subcommand("parse", "parse one sentence");
  add_domain(parse, parse_c, true);
  add_gp(parse, parse_c.gp);
  parse->add_option("--mode", mode, "full-parse | skip | restarts | mdp")->capture_default_str();
  parse->add_option("--max-penalty", max_penalty, "maximum deviation penalty K for mdp")->capture_default_str();
  parse->add_option("--beam", beam, "beam width, 0 for unbounded")->capture_default_str();
  parse->add_flag("--repair", repair, "combine restarts chunks with the repair stage");
  parse->add_flag("--trace", trace, "print GSS snapshots to stderr");
  parse->add_option("sentence", words, "sentence words")->required();

  // train-stats
  Common stats_c;
  std::string stats_corpus = "data/scheduling/train.tsv";
  std::string stats_out;
  auto* train_stats = app.add_subcommand("train-stats", "estimate slot/filler mutual information from gold structures");
  add_domain(train_stats, stats_c, false);
  train_stats->add_option("--corpus", stats_corpus, "training corpus")->capture_default_str();
  train_stats->add_option("--out,-o", stats_out, "output file")->required();

  // train-fitness
  Common fit_c;
  std::string fit_corpus = "data/scheduling/train.tsv";
  std::string fit_out;
  std::size_t max_chunks = 5;
  auto* train_fit = app.add_subcommand("train-fitness", "learn the hypothesis ranking expression");
  add_domain(train_fit, fit_c, true);
  add_gp(train_fit, fit_c.gp);
  train_fit->add_option("--corpus", fit_corpus, "training corpus")->capture_default_str();
  train_fit->add_option("--max-chunks", max_chunks, "skip sentences with more chunks")->capture_default_str();
  train_fit->add_option("--out,-o", fit_out, "output file")->required();

  // bench
  Common bench_c;
  std::string bench_corpus;
  std::string strategies = "MDP1,MDP3,MDP5,restarts,restarts+repair";
  std::string out_dir = "bench-out";
  auto* bench = app.add_subcommand("bench", "run parsing strategies over a corpus and write quality/timing reports");
  add_domain(bench, bench_c, true);
  add_gp(bench, bench_c.gp);
  bench->add_option("--corpus", bench_corpus, "corpus file")->required();
  bench->add_option("--strategies", strategies, "comma-separated strategy labels")->capture_default_str();
  bench->add_option("--out-dir", out_dir, "report directory")->capture_default_str();
  bench->add_option("--beam", beam, "beam width for mdp strategies, 0 for unbounded")->capture_default_str();

  // gen-corpus
  Common gen_c;
  GenConfig gen;
  std::string gen_out;
  std::size_t synth_rules = 0;
  std::string domain_dir;
  auto* gen_corpus = app.add_subcommand("gen-corpus", "sample and corrupt a synthetic corpus");
  add_domain(gen_corpus, gen_c, false);
  gen_corpus->add_option("--count,-n", gen.sentences, "number of sentences")->capture_default_str();
  gen_corpus->add_option("--seed", gen.seed, "random seed")->capture_default_str();
  gen_corpus->add_option("--delete-rate", gen.delete_rate, "per-token deletion probability")->capture_default_str();
  gen_corpus->add_option("--insert-rate", gen.insert_rate, "per-token in-vocabulary insertion probability")->capture_default_str();
  gen_corpus->add_option("--foreign-rate", gen.foreign_rate, "per-token foreign-word insertion probability")->capture_default_str();
  gen_corpus->add_option("--max-tokens", gen.max_tokens, "longest sampled sentence")->capture_default_str();
  gen_corpus->add_option("--synthesize", synth_rules, "first generate a random grammar with at least this many rules");
  gen_corpus->add_option("--domain-dir", domain_dir, "where --synthesize writes grammar.txt and spec.txt");
  gen_corpus->add_option("--out,-o", gen_out, "corpus file (stdout when absent)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*compile) {
      auto table = compile_tables(load_g(compile_c), chunk_table ? TableStart::AnyCategory : TableStart::Grammar);
      if (table_out.empty()) std::cout << table.serialize();
      else write_file(table_out, table.serialize());
      std::cerr << table.state_count() << " states, " << table.conflict_count() << " conflicted cells\n";
    } else if (*parse) {
      auto g = load_g(parse_c);
      auto spec = load_s(parse_c);
      RobustParser parser(g, spec);
      std::vector<std::string> tokens;
      for (const auto& w : words)
        for (auto& t : tokenize(w)) tokens.push_back(std::move(t));
      FlexConfig config;
      config.mode = parse_flex_mode(mode);
      config.max_penalty = max_penalty;
      config.beam_width = beam;
      if (trace) config.trace = &std::cerr;
      if (config.mode == FlexMode::Restarts) {
        ChunkSet chunks = parser.chunks(tokens, config);
        for (std::size_t i = 0; i < chunks.chunks.size(); ++i) {
          std::cout << "Chunk" << (i + 1) << ": ";
          print_analysis(chunks.chunks[i], *spec);
        }
        for (auto u : chunks.uncovered) std::cout << "uncovered " << u << " " << tokens[u] << '\n';
        if (repair) {
          if (!needs_repair(chunks)) {
            std::cout << "no repair needed\n";
          } else if (auto structures = chunk_structures(chunks); !structures.empty()) {
            auto art = load_artifacts(parse_c);
            auto hyps = evolve(structures, *spec, art.fitness, art.stats, art.gp);
            const auto& top = hyps.front();
            std::cout << "Hypothesis (fitness " << format_double(top.fitness) << "):\n"
                      << format_hypothesis(top, structures, *spec) << "\nResult:\n"
                      << to_literal(*top.result, *spec) << '\n';
          }
        }
      } else {
        auto analyses = parser.parse(tokens, config);
        if (analyses.empty()) std::cout << "NIL\n";
        if (auto best = select_best(analyses)) print_analysis(*best, *spec);
        if (analyses.size() > 1) std::cout << analyses.size() << " analyses\n";
      }
    } else if (*train_stats) {
      auto spec = load_s(stats_c);
      std::vector<FsPtr> golds;
      for (const auto& e : load_corpus(stats_corpus, *spec)) golds.push_back(e.gold);
      write_file(stats_out, train_mi(golds, *spec).serialize());
    } else if (*train_fit) {
      auto spec = load_s(fit_c);
      RobustParser parser(load_g(fit_c), spec);
      auto stats = StatModel::load(fit_c.stats_file);
      auto examples = build_ranked_examples(load_corpus(fit_corpus, *spec), parser, stats, max_chunks);
      if (examples.empty()) throw Error(ErrorCode::EmptyCorpus, "no sentence produced a ranked example");
      auto f = train_fitness(examples, fit_c.gp);
      std::cerr << examples.size() << " ranked examples, pairwise accuracy "
                << format_double(pairwise_accuracy(f, examples)) << '\n';
      write_file(fit_out, f.serialize());
    } else if (*bench) {
      auto spec = load_s(bench_c);
      RobustParser parser(load_g(bench_c), spec);
      auto corpus = load_corpus(bench_corpus, *spec);
      std::vector<StrategyConfig> configs;
      bool needs_artifacts = false;
      for (auto label : split(strategies, ',')) {
        configs.push_back(strategy_from_label(trim(label)));
        configs.back().flex.beam_width = beam;
        needs_artifacts |= configs.back().repair;
      }
      TrainedArtifacts art{{}, {}, bench_c.gp};
      if (needs_artifacts) art = load_artifacts(bench_c);
      std::vector<StrategyReport> reports;
      for (const auto& s : configs) reports.push_back(run_strategy(corpus, parser, s, art));
      emit_report(reports, out_dir);
      std::cout << quality_csv(reports);
    } else if (*gen_corpus) {
      std::shared_ptr<const Grammar> g;
      std::shared_ptr<const InterlinguaSpec> spec;
      if (synth_rules > 0) {
        auto domain = synthesize_domain(synth_rules, gen.seed);
        g = std::make_shared<const Grammar>(Grammar::parse(domain.grammar));
        spec = std::make_shared<const InterlinguaSpec>(InterlinguaSpec::parse(domain.spec));
        if (!domain_dir.empty()) {
          write_file(domain_dir + "/grammar.txt", domain.grammar);
          write_file(domain_dir + "/spec.txt", domain.spec);
        }
      } else {
        g = load_g(gen_c);
        spec = load_s(gen_c);
      }
      auto text = serialize_corpus(generate_corpus(*g, *spec, gen), *spec);
      if (gen_out.empty()) std::cout << text;
      else write_file(gen_out, text);
    }
  } catch (const Error& e) {
    std::cerr << "rose: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
