#include "doctest.h"
#include "oracles.hpp"
#include "properties.hpp"
#include "rose/parse_table.hpp"

using namespace rose;
using namespace rose::testing;

namespace {

std::shared_ptr<const Grammar> grammar(const char* text) { return std::make_shared<const Grammar>(load_grammar(text)); }

std::size_t max_cell(const ParseTable& t) {
  std::size_t best = 0;
  for (std::uint32_t s = 0; s < t.state_count(); ++s)
    for (auto x : t.grammar().terminals()) best = std::max(best, t.actions(s, x).size());
  for (std::uint32_t s = 0; s < t.state_count(); ++s) best = std::max(best, t.actions(s, Grammar::kEnd).size());
  return best;
}

// Unambiguous SLR(1) grammars.
const char* const kSlrGrammars[] = {
    "%start S\n%terminal a\nS -> a\n",
    "%start E\n%terminal plus times lp rp id\nE -> E plus T\nE -> T\nT -> T times F\nT -> F\nF -> lp E rp\nF -> id\n",
    "%start L\n%terminal comma x\nL -> L comma x\nL -> x\n",
    "%start S\n%terminal lp rp\nS -> lp S rp S\nS ->\n",
    "%start S\n%terminal a b c\nS -> A B\nA -> a A\nA -> c\nB -> b\nB ->\n",
};

}  // namespace

TEST_CASE("S -> a has three LR(0) states") {
  const auto t = compile_tables(grammar(kSlrGrammars[0]));
  CHECK(t.state_count() == 3);
  CHECK(t.conflict_count() == 0);
}

TEST_CASE("ambiguous E -> E plus E | a has a shift/reduce cell") {
  const auto t = compile_tables(grammar("%start E\n%terminal plus a\nE -> E plus E\nE -> a\n"));
  const SymbolId plus = *t.grammar().find("plus");
  bool found = false;
  for (std::uint32_t s = 0; s < t.state_count(); ++s) {
    bool shift = false, reduce = false;
    for (const auto& a : t.actions(s, plus)) {
      shift |= a.kind == TableAction::Kind::Shift;
      reduce |= a.kind == TableAction::Kind::Reduce;
    }
    found |= shift && reduce;
  }
  CHECK(found);
  CHECK(t.conflict_count() >= 1);
}

TEST_CASE("SLR(1) grammars: one action per cell, same table as the textbook construction") {
  for (const char* text : kSlrGrammars) {
    auto g = grammar(text);
    const auto t = compile_tables(g);
    INFO(text);
    CHECK(max_cell(t) <= 1);
    CHECK(compare_tables(t, textbook_slr(*g)) == "");
  }
}

TEST_CASE("shipped and toy grammars match the textbook construction") {
  CHECK(compare_tables(compile_tables(scheduling_grammar()), textbook_slr(*scheduling_grammar())) == "");
  CHECK(compare_tables(compile_tables(toy_grammar()), textbook_slr(*toy_grammar())) == "");
  CHECK(compile_tables(scheduling_grammar()).conflict_count() == 0);
}

TEST_CASE("serialization") {
  auto g = scheduling_grammar();
  const auto t = compile_tables(g);
  const std::string text = t.serialize();
  CHECK(compile_tables(g).serialize() == text);
  auto back = ParseTable::deserialize(text, g);
  REQUIRE(back);
  CHECK(back->serialize() == text);
  CHECK_FALSE(ParseTable::deserialize(text, toy_grammar()));

  const auto chunk = compile_tables(g, TableStart::AnyCategory);
  CHECK(chunk.start_kind() == TableStart::AnyCategory);
  auto chunk_back = ParseTable::deserialize(chunk.serialize(), g);
  REQUIRE(chunk_back);
  CHECK(chunk_back->start_kind() == TableStart::AnyCategory);
}

TEST_CASE("FIRST and FOLLOW") {
  auto g = grammar(kSlrGrammars[4]);
  const auto sets = compute_sets(*g);
  const SymbolId A = *g->find("A"), B = *g->find("B"), a = *g->find("a"), b = *g->find("b"), c = *g->find("c");
  CHECK(sets.nullable[B]);
  CHECK_FALSE(sets.nullable[A]);
  CHECK(sets.first[A][a]);
  CHECK(sets.first[A][c]);
  CHECK_FALSE(sets.first[A][b]);
  CHECK(sets.follow[A][b]);
  CHECK(sets.follow[A][Grammar::kEnd]);
}

TEST_CASE("property: table determinism") {
  auto r = run_property("table-determinism", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: SLR construction matches the textbook on random grammars") {
  auto r = run_property("slr-cross-check", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
