#include "doctest.h"
#include "oracles.hpp"
#include "properties.hpp"
#include "rose/error.hpp"
#include "rose/interlingua.hpp"

using namespace rose;
using namespace rose::testing;

namespace {

// Figure 3 Result1: the time expression and *THAT share WHEN.
const char* const kResult1 =
    "((FRAME *RESPOND) (DEGREE NORMAL) (TYPE NEGATIVE) (WHEN (*MULTIPLE* ((FRAME *SIMPLE-TIME) (TIME-OF-DAY MORNING) "
    "(NUMBER PLURAL) (SIMPLE-UNIT-NAME TOD)) ((FRAME *THAT) (ROOT THAT) (TYPE PRONOUN)))))";

}  // namespace

TEST_CASE("literals") {
  const auto& spec = *scheduling_spec();
  const FsPtr ideal = parse_fs(kIdealStructure);
  CHECK(to_literal(*ideal, spec) == kIdealStructure);
  // Figure 1 prints slots in arbitrary order; FRAME comes first once printed.
  CHECK(to_literal(*parse_fs("((TYPE NEGATIVE) (DEGREE NORMAL) (FRAME *RESPOND))"), spec) ==
        "((FRAME *RESPOND) (DEGREE NORMAL) (TYPE NEGATIVE))");
  CHECK(to_literal(*parse_fs(kResult1), spec) == kResult1);
  const Value n = parse_value("12");
  CHECK(std::get<Atom>(n).kind == Atom::Kind::Number);
  CHECK(to_literal(*parse_fs("((FRAME *SIMPLE-TIME) (NUMBER 2.50))")) == "((FRAME *SIMPLE-TIME) (NUMBER 2.50))");
  CHECK_THROWS_AS(parse_fs("((FRAME *A) (X"), Error);
}

TEST_CASE("validate") {
  const auto& spec = *scheduling_spec();
  CHECK(is_valid(*parse_fs(kIdealStructure), spec));
  CHECK(is_valid(*parse_fs(kResult1), spec));
  CHECK(is_valid(*parse_fs("((FRAME *SIMPLE-TIME))"), spec));

  const auto v = validate(*parse_fs("((FRAME *SIMPLE-TIME) (WHEN ((FRAME *THAT))))"), spec);
  REQUIRE(v.size() == 1);
  CHECK(v[0].path == "WHEN");

  const auto nested = validate(*parse_fs("((FRAME *RESPOND) (WHEN ((FRAME *SIMPLE-TIME) (WHEN ((FRAME *THAT))))))"), spec);
  REQUIRE(nested.size() == 1);
  CHECK(nested[0].path == "WHEN.WHEN");

  // WHEN does not admit a *RESPOND filler
  CHECK_FALSE(is_valid(*parse_fs("((FRAME *RESPOND) (WHEN ((FRAME *RESPOND))))"), spec));
  CHECK_FALSE(is_valid(*parse_fs("((FRAME *UNDECLARED))"), spec));
}

TEST_CASE("spec files") {
  CHECK_NOTHROW(InterlinguaSpec::parse("frame *A : X\nslot X : @symbol\n"));
  CHECK_THROWS_AS(InterlinguaSpec::parse("frame *A : X\nslot X : *B\n"), Error);
  CHECK_THROWS_AS(InterlinguaSpec::parse("frame *A : X\nslot X :\n"), Error);
  const auto& spec = *scheduling_spec();
  CHECK(spec.type_of("*SIMPLE-TIME") == "TEMPORAL");
  CHECK(InterlinguaSpec::parse(spec.serialize()).serialize() == spec.serialize());
}

TEST_CASE("insert") {
  const auto& spec = *scheduling_spec();
  const FsPtr chunk2 = parse_fs(kChunk2), chunk4 = parse_fs(kChunk4), chunk1 = parse_fs(kChunk1);

  SUBCASE("Figure 2: the time expression fills WHEN") {
    auto r = insert(*chunk2, chunk4, spec);
    REQUIRE(r);
    CHECK(r->slot == "WHEN");
    CHECK(to_literal(*r->result, spec) == kIdealStructure);
    // Operands are untouched.
    CHECK(chunk2->find("WHEN") == nullptr);
  }

  SUBCASE("Figure 3: a second filler turns WHEN into a set") {
    auto first = insert(*chunk2, chunk4, spec);
    auto r = insert(*first->result, chunk1, spec);
    REQUIRE(r);
    CHECK(r->slot == "WHEN");
    CHECK(to_literal(*r->result, spec) == kResult1);
  }

  SUBCASE("Figure 4: nothing admits a response inside a time") {
    CHECK_FALSE(insert(*chunk4, chunk2, spec));
  }

  SUBCASE("statistics pick among licensed empty slots") {
    const auto s = InterlinguaSpec::parse(
        "type T : *CHILD\nframe *P : FIRST SECOND\nframe *CHILD : \nslot FIRST : T\nslot SECOND : T\n");
    StatModel stats({"FIRST", "SECOND"}, {"T", "@atom"});
    stats.count("SECOND", "T", 5);
    stats.count("FIRST", "@atom", 5);
    const FsPtr parent = parse_fs("((FRAME *P))");
    const FsPtr child = parse_fs("((FRAME *CHILD))");
    CHECK(insert(*parent, child, s)->slot == "FIRST");
    CHECK(insert(*parent, child, s, &stats)->slot == "SECOND");
  }
}

TEST_CASE("merge") {
  const auto& spec = *scheduling_spec();
  const FsPtr x = parse_fs(kChunk4);
  auto same = merge(x, x, spec);
  REQUIRE(same);
  CHECK(**same == *x);

  auto both = merge(parse_fs("((FRAME *SIMPLE-TIME) (TIME-OF-DAY MORNING))"),
                    parse_fs("((FRAME *SIMPLE-TIME) (NUMBER PLURAL))"), spec);
  REQUIRE(both);
  CHECK(to_literal(**both, spec) == "((FRAME *SIMPLE-TIME) (TIME-OF-DAY MORNING) (NUMBER PLURAL))");

  CHECK_FALSE(merge(x, parse_fs(kChunk2), spec));
  CHECK_FALSE(merge(parse_fs("((FRAME *SIMPLE-TIME) (NUMBER PLURAL))"),
                    parse_fs("((FRAME *SIMPLE-TIME) (NUMBER SINGULAR))"), spec));
}

TEST_CASE("size") {
  CHECK(size(*parse_fs(kChunk4)) == 4);
  CHECK(size(*parse_fs(kIdealStructure)) == 7);
  CHECK(size(*parse_fs("((FRAME *THAT))")) == 1);
  CHECK(size(*parse_fs(kResult1)) == 10);
}

TEST_CASE("similarity") {
  const FsPtr ideal = parse_fs(kIdealStructure);
  const auto self = similarity(*ideal, *ideal);
  CHECK(self.precision == 1.0);
  CHECK(self.recall == 1.0);
  CHECK(self.f1 == 1.0);

  const auto none = similarity(*parse_fs(kChunk1), *ideal);
  CHECK(none.precision == 0.0);
  CHECK(none.recall == 0.0);
  CHECK(none.f1 == 0.0);

  // Ideal facts: 2 frames, 5 atomic edges, 1 WHEN edge = 8.  Result2
  // (Chunk4) holds 4 of them and nothing else.
  CHECK(facts(*ideal).size() == 8);
  const auto r2 = similarity(*parse_fs(kChunk4), *ideal);
  CHECK(r2.precision == 1.0);
  CHECK(r2.recall == doctest::Approx(4.0 / 8.0));
  CHECK(r2.f1 == doctest::Approx(2.0 / 3.0));

  // Result1 adds *THAT: frame, ROOT, TYPE, WHEN edge = 4 extra facts.
  const auto r1 = similarity(*parse_fs(kResult1), *ideal);
  CHECK(r1.precision == doctest::Approx(8.0 / 12.0));
  CHECK(r1.recall == 1.0);
  CHECK(r1.f1 == doctest::Approx(0.8));
}

TEST_CASE("property: insert preserves validity") {
  auto r = run_property("insert-validity-closure", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: merge commutes") {
  auto r = run_property("merge-commutativity", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: size is additive under insertion into an empty slot") {
  auto r = run_property("size-additivity", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: similarity symmetry") {
  auto r = run_property("similarity-symmetry", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("property: literal round trip") {
  auto r = run_property("literal-round-trip", 1000);
  INFO(r.first_failure);
  CHECK(r.ok());
}
