#include <cmath>
#include <map>

#include "doctest.h"
#include "oracles.hpp"
#include "properties.hpp"
#include "rose/error.hpp"
#include "rose/fitness.hpp"
#include "rose/repair.hpp"

using namespace rose;
using namespace rose::testing;

namespace {

RepairProgram L(std::uint32_t c) { return RepairProgram::leaf(c); }
RepairProgram C(const RepairProgram& a, const RepairProgram& b) { return RepairProgram::comb(a, b); }

const char* const kResult1 =
    "((FRAME *RESPOND) (DEGREE NORMAL) (TYPE NEGATIVE) (WHEN (*MULTIPLE* ((FRAME *SIMPLE-TIME) (TIME-OF-DAY MORNING) "
    "(NUMBER PLURAL) (SIMPLE-UNIT-NAME TOD)) ((FRAME *THAT) (ROOT THAT) (TYPE PRONOUN)))))";

// Ten gold structures whose slot/type counts are written out by hand below.
std::vector<FsPtr> small_corpus() {
  std::vector<FsPtr> out;
  for (int i = 0; i < 6; ++i)
    out.push_back(parse_fs("((FRAME *RESPOND) (TYPE NEGATIVE) (WHEN ((FRAME *SIMPLE-TIME) (DAY-OF-WEEK MONDAY))))"));
  for (int i = 0; i < 4; ++i) out.push_back(parse_fs("((FRAME *RESPOND) (WHEN ((FRAME *THAT) (ROOT THAT))))"));
  return out;
}

// Add-one MI over a 10 slot x 5 type table (RESPONSE TEMPORAL DEMONSTRATIVE
// PERSON @atom), computed from the counts directly.
double oracle_mi(const std::map<std::pair<std::string, std::string>, double>& raw, const std::string& slot,
                 const std::string& type) {
  const std::vector<std::string> slots{"DEGREE", "TYPE", "WHEN", "TIME-OF-DAY", "DAY-OF-WEEK",
                                       "NUMBER", "SIMPLE-UNIT-NAME", "START", "END", "ROOT"};
  const std::vector<std::string> types{"RESPONSE", "TEMPORAL", "DEMONSTRATIVE", "PERSON", "@atom"};
  auto c = [&](const std::string& s, const std::string& t) {
    auto it = raw.find({s, t});
    return (it == raw.end() ? 0.0 : it->second) + 1.0;
  };
  double total = 0, row = 0, col = 0;
  for (const auto& s : slots)
    for (const auto& t : types) total += c(s, t);
  for (const auto& t : types) row += c(slot, t);
  for (const auto& s : slots) col += c(s, type);
  return std::log2(c(slot, type) * total / (row * col));
}

Hypothesis hyp(RepairProgram p, const char* literal) {
  Hypothesis h;
  h.program = std::move(p);
  h.result = parse_fs(literal);
  return h;
}

}  // namespace

TEST_CASE("train_mi against hand counts") {
  const auto& spec = *scheduling_spec();
  REQUIRE(spec.slot_decls().size() == 10);
  REQUIRE(spec.type_tags().size() == 5);
  const auto corpus = small_corpus();
  const StatModel m = train_mi(corpus, spec);

  const std::map<std::pair<std::string, std::string>, double> raw{{{"TYPE", "@atom"}, 6},
                                                                  {{"WHEN", "TEMPORAL"}, 6},
                                                                  {{"DAY-OF-WEEK", "@atom"}, 6},
                                                                  {{"WHEN", "DEMONSTRATIVE"}, 4},
                                                                  {{"ROOT", "@atom"}, 4}};
  for (const auto& s : m.slots())
    for (const auto& t : m.types()) {
      INFO(s << "/" << t);
      auto it = raw.find({s, t});
      CHECK(m.raw_count(s, t) == (it == raw.end() ? 0.0 : it->second));
      CHECK(m.mi(s, t) == doctest::Approx(oracle_mi(raw, s, t)));
      CHECK(*m.score(s, t) == doctest::Approx(oracle_mi(raw, s, t)));
    }

  // The pair seen most often with WHEN tops its row.
  for (const auto& t : m.types()) CHECK(m.mi("WHEN", "TEMPORAL") >= m.mi("WHEN", t));
  CHECK(m.mi("ROOT", "TEMPORAL") < 0);
  CHECK(m.mi("NOT-A-SLOT", "TEMPORAL") == 0);
  CHECK_FALSE(m.score("NOT-A-SLOT", "TEMPORAL"));
  CHECK(m.probability("WHEN", "TEMPORAL") == doctest::Approx(7.0 / 76.0));

  CHECK(StatModel::parse(m.serialize()).serialize() == m.serialize());
}

TEST_CASE("train_mi errors") {
  const auto& spec = *scheduling_spec();
  try {
    train_mi(std::vector<FsPtr>{}, spec);
    FAIL("expected empty-corpus");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCorpus);
  }
  try {
    train_mi(std::vector<FsPtr>{parse_fs("((FRAME *RESPOND) (WHEN ((FRAME *RESPOND))))")}, spec);
    FAIL("expected spec-violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpecViolation);
  }
}

TEST_CASE("score_features") {
  const auto& spec = *scheduling_spec();
  const auto& stats = scheduling_stats();
  const std::vector<FsPtr> chunks{parse_fs(kChunk1), parse_fs(kChunk2), parse_fs(kChunk3), parse_fs(kChunk4)};

  const Hypothesis fig2 = eval_program(C(L(1), L(3)), chunks, spec, &stats);
  const FeatureTriple f = score_features(fig2, stats);
  CHECK(f.n_ops == 1);
  CHECK(f.size_score == 7);
  CHECK(f.avg_stat == doctest::Approx(stats.mi("WHEN", "TEMPORAL")));

  const Hypothesis bare = eval_program(L(3), chunks, spec, &stats);
  CHECK(score_features(bare, stats) == FeatureTriple{0, 4, 0});

  const Hypothesis fig3 = eval_program(C(C(L(1), L(3)), L(0)), chunks, spec, &stats);
  CHECK(score_features(fig3, stats).n_ops == 2);
  CHECK(score_features(fig3, stats).size_score == 10);
}

TEST_CASE("ideal_rank") {
  const FsPtr gold = parse_fs(kIdealStructure);
  const std::vector<Hypothesis> hs{hyp(L(3), kChunk4), hyp(C(C(L(1), L(3)), L(0)), kResult1),
                                   hyp(C(L(1), L(3)), kIdealStructure)};
  CHECK(ideal_rank(hs, *gold) == std::vector<std::size_t>{2, 1, 0});

  // Equal f1: fewer operations first, otherwise input order.
  const std::vector<Hypothesis> ties{hyp(C(L(0), L(1)), kChunk4), hyp(L(0), kChunk4), hyp(L(1), kChunk4)};
  CHECK(ideal_rank(ties, *gold) == std::vector<std::size_t>{1, 2, 0});
}

TEST_CASE("fitness expressions") {
  const auto& f = scheduling_fitness();
  CHECK(FitnessExpression::parse(f.to_string()) == f);
  CHECK(FitnessExpression::deserialize(f.serialize()) == f);

  const auto e = FitnessExpression::parse("(+ x2 (* -0.5 x1))");
  CHECK(e.evaluate({2, 7, 0}) == doctest::Approx(6.0));
  CHECK(e.to_string() == "(+ x2 (* -0.5 x1))");
  CHECK(e.depth() == 2);

  // Protected division.
  CHECK(FitnessExpression::parse("(/ x2 x1)").evaluate({0, 5, 0}) == 1.0);
  CHECK(FitnessExpression::parse("(/ x2 x1)").evaluate({2, 5, 0}) == 2.5);
  CHECK_THROWS_AS(FitnessExpression::parse("(^ x1 x2)"), Error);
  CHECK_THROWS_AS(FitnessExpression::parse("x4"), Error);
}

TEST_CASE("pairwise accuracy") {
  const RankedExample ex{{{0, 9, 0}, {0, 5, 0}, {0, 1, 0}}, {}};
  const std::vector<RankedExample> exs{ex};
  CHECK(pairwise_accuracy(FitnessExpression::variable(1), exs) == 1.0);
  CHECK(pairwise_accuracy(FitnessExpression::binary(FitnessExpression::Op::Sub, FitnessExpression::constant(0),
                                                    FitnessExpression::variable(1)),
                          exs) == 0.0);
  // Shared tier: no pairs.
  const std::vector<RankedExample> tied{{{{0, 9, 0}, {0, 5, 0}}, {0, 0}}};
  CHECK(pairwise_accuracy(FitnessExpression::variable(1), tied) == 1.0);
}

namespace {

std::vector<RankedExample> synthetic_examples(std::uint64_t seed, std::size_t count, int target) {
  Rng rng(seed);
  std::uniform_real_distribution<double> x2(1, 20), x3(-2, 2);
  std::uniform_int_distribution<int> x1(0, 4);
  std::vector<RankedExample> out;
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<FeatureTriple> fs;
    for (int k = 0; k < 6; ++k) fs.push_back({double(x1(rng)), x2(rng), x3(rng)});
    auto key = [&](const FeatureTriple& f) { return target == 0 ? f.size_score : (f.size_score - f.n_ops) + f.avg_stat; };
    std::stable_sort(fs.begin(), fs.end(), [&](const auto& a, const auto& b) { return key(a) > key(b); });
    out.push_back({fs, {}});
  }
  return out;
}

}  // namespace

TEST_CASE("train_fitness recovers orderings") {
  GpParams params;
  params.seed = 3;

  SUBCASE("single feature") {
    const auto f = train_fitness(synthetic_examples(1, 60, 0), params);
    CHECK(pairwise_accuracy(f, synthetic_examples(2, 40, 0)) == 1.0);
  }

  SUBCASE("hidden linear target") {
    const auto f = train_fitness(synthetic_examples(3, 80, 1), params);
    const double held_out = pairwise_accuracy(f, synthetic_examples(4, 40, 1));
    INFO(f.to_string());
    CHECK(held_out >= 0.9);
  }

  SUBCASE("all ties is not an error") {
    const std::vector<RankedExample> flat{{{{1, 1, 1}, {1, 1, 1}}, {}}};
    CHECK_NOTHROW(train_fitness(flat, params));
  }
}

TEST_CASE("property: affine ranking invariance") {
  auto r = run_property("affine-ranking-invariance", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: protected division") {
  auto r = run_property("protected-division", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: fitness expression round trip") {
  auto r = run_property("fitness-expression-round-trip", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: train_mi is order independent") {
  auto r = run_property("train-mi-permutation-invariance", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: train_fitness is deterministic") {
  auto r = run_property("train-fitness-determinism", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
