#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "properties.hpp"
#include "rose/error.hpp"
#include "rose/harness.hpp"
#include "rose/text_util.hpp"

using namespace rose;
using namespace rose::testing;
namespace fs = std::filesystem;

namespace {

TrainedArtifacts artifacts() { return {scheduling_stats(), scheduling_fitness(), GpParams{}}; }

std::vector<CorpusEntry> figure1_corpus() {
  return parse_corpus(std::string("fig1\tthat wipes out my mornings\t") + kIdealStructure + "\n", *scheduling_spec());
}

fs::path scratch(const char* name) {
  auto p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("grade") {
  const FsPtr gold = parse_fs(kIdealStructure);
  CHECK(grade(nullptr, *gold) == Bucket::Nil);
  CHECK(grade(gold, *gold) == Bucket::Perfect);
  CHECK(grade(parse_fs(kChunk4), *gold) == Bucket::Partial);
  CHECK(grade(parse_fs(kChunk1), *gold) == Bucket::Bad);
  CHECK(grade(parse_fs("((FRAME *RESPOND) (DEGREE NORMAL) (TYPE NEGATIVE) (WHEN (*MULTIPLE* ((FRAME *SIMPLE-TIME) "
                       "(TIME-OF-DAY MORNING) (NUMBER PLURAL) (SIMPLE-UNIT-NAME TOD)) ((FRAME *THAT) (ROOT THAT) "
                       "(TYPE PRONOUN)))))"),
              *gold) == Bucket::Okay);
  CHECK(std::string(to_string(Bucket::Okay)) == "Okay");
}

TEST_CASE("strategy labels") {
  const auto all = paper_strategies();
  REQUIRE(all.size() == 5);
  CHECK(all[0].flex.max_penalty == 1);
  CHECK(all[2].flex.max_penalty == 5);
  CHECK(all[3].flex.mode == FlexMode::Restarts);
  CHECK_FALSE(all[3].repair);
  CHECK(all[4].repair);
  CHECK(strategy_from_label("mdp7").flex.max_penalty == 7);
  CHECK(strategy_from_label("Restarts+Repair").repair);
  CHECK_THROWS_AS(strategy_from_label("mdp"), Error);
  CHECK_THROWS_AS(strategy_from_label("beam"), Error);
}

TEST_CASE("Figure 1 through restarts and repair") {
  const RobustParser p(scheduling_grammar(), scheduling_spec());
  const auto r = run_strategy(figure1_corpus(), p, strategy_from_label("restarts+repair"), artifacts());
  REQUIRE(r.sentences.size() == 1);
  CHECK(r.sentences[0].bucket == Bucket::Perfect);
  CHECK(r.sentences[0].repaired);
  CHECK(r.sentences[0].chunk_count == 4);

  const auto plain = run_strategy(figure1_corpus(), p, strategy_from_label("restarts"), artifacts());
  CHECK(plain.sentences[0].bucket == Bucket::Partial);
  CHECK(run_strategy(figure1_corpus(), p, strategy_from_label("MDP1"), artifacts()).sentences[0].bucket ==
        Bucket::Nil);
}

TEST_CASE("reports") {
  const RobustParser p(scheduling_grammar(), scheduling_spec());
  const auto corpus = load_corpus(data_path("data/scheduling/train.tsv"), *scheduling_spec());
  REQUIRE(corpus.size() >= 10);
  const std::vector<CorpusEntry> head(corpus.begin(), corpus.begin() + 10);

  SUBCASE("empty corpus writes nothing") {
    const auto dir = scratch("rose-empty-report");
    const std::vector<StrategyReport> none{StrategyReport{"MDP1", {}}};
    try {
      emit_report(none, dir.string());
      FAIL("expected empty-corpus");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyCorpus);
    }
    CHECK_FALSE(fs::exists(dir / "quality.csv"));
    CHECK_FALSE(fs::exists(dir / "timing.csv"));
  }

  SUBCASE("quality.csv is reproducible") {
    std::vector<StrategyReport> a, b;
    for (const auto& s : paper_strategies()) {
      a.push_back(run_strategy(head, p, s, artifacts()));
      b.push_back(run_strategy(head, p, s, artifacts()));
    }
    CHECK(quality_csv(a) == quality_csv(b));
    const auto dir = scratch("rose-report");
    emit_report(a, dir.string());
    CHECK(read_file((dir / "quality.csv").string()) == quality_csv(a));
    CHECK(fs::exists(dir / "timing.csv"));
    for (const auto& r : a) {
      std::size_t total = 0;
      for (auto c : r.counts()) total += c;
      CHECK(total == head.size());
    }
  }
}

TEST_CASE("grammatical sentences are parsed perfectly without repair") {
  const auto g = scheduling_grammar();
  const RobustParser p(g, scheduling_spec());
  GenConfig c;
  c.sentences = 30;
  c.delete_rate = c.insert_rate = c.foreign_rate = 0;
  const auto corpus = generate_corpus(*g, *scheduling_spec(), c);
  REQUIRE(corpus.size() == 30);
  for (const char* label : {"MDP1", "restarts+repair"}) {
    const auto r = run_strategy(corpus, p, strategy_from_label(label), artifacts());
    CHECK(r.percent(Bucket::Perfect) == 100.0);
    for (const auto& s : r.sentences) CHECK_FALSE(s.repaired);
  }
}

TEST_CASE("more flexibility never adds NIL") {
  const auto g = scheduling_grammar();
  const RobustParser p(g, scheduling_spec());
  GenConfig c;
  c.sentences = 40;
  c.seed = 9;
  const auto corpus = generate_corpus(*g, *scheduling_spec(), c);
  const auto nil = [&](const char* label) {
    return run_strategy(corpus, p, strategy_from_label(label), artifacts()).counts()[0];
  };
  CHECK(nil("MDP5") <= nil("MDP3"));
  CHECK(nil("MDP3") <= nil("MDP1"));
}

TEST_CASE("corpus files") {
  const auto& spec = *scheduling_spec();
  const auto corpus = load_corpus(data_path("data/scheduling/train.tsv"), spec);
  CHECK(serialize_corpus(parse_corpus(serialize_corpus(corpus, spec), spec), spec) == serialize_corpus(corpus, spec));
  CHECK_THROWS_AS(parse_corpus("x\tonly two fields\n", spec), Error);

  GenConfig c;
  c.sentences = 20;
  CHECK(serialize_corpus(generate_corpus(*scheduling_grammar(), spec, c), spec) ==
        serialize_corpus(generate_corpus(*scheduling_grammar(), spec, c), spec));
}

TEST_CASE("synthetic domain") {
  const auto d = synthesize_domain(200, 4);
  const Grammar g = load_grammar(d.grammar);
  CHECK(g.rules().size() >= 200);
  const auto spec = InterlinguaSpec::parse(d.spec);
  GenConfig c;
  c.sentences = 10;
  const auto corpus = generate_corpus(g, spec, c);
  CHECK(corpus.size() == 10);
  for (const auto& e : corpus) CHECK(is_valid(*e.gold, spec));
  CHECK(synthesize_domain(200, 4).grammar == d.grammar);
}

TEST_CASE("property: bucket totals") {
  auto r = run_property("bucket-totals", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
