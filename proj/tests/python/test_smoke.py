import os
from pathlib import Path

import pytest

import rose

DATA = Path(os.environ.get("ROSE_DATA", Path(__file__).resolve().parents[2] / "data")) / "scheduling"

IDEAL = (
    "((FRAME *RESPOND) (DEGREE NORMAL) (TYPE NEGATIVE) (WHEN ((FRAME *SIMPLE-TIME) "
    "(TIME-OF-DAY MORNING) (NUMBER PLURAL) (SIMPLE-UNIT-NAME TOD))))"
)


@pytest.fixture(scope="module")
def parser():
    return rose.Parser((DATA / "grammar.txt").read_text(), (DATA / "spec.txt").read_text())


@pytest.fixture(scope="module")
def spec():
    return rose.Spec.load(str(DATA / "spec.txt"))


def test_tokenize():
    assert rose.tokenize("That wipes out my mornings.") == ["that", "wipes", "out", "my", "mornings"]


def test_full_parse(parser):
    [a] = parser.parse("mornings are out", mode="full-parse")
    assert a["value"] == IDEAL
    assert a["penalty"] == 0


def test_restarts_and_repair(parser, spec):
    cs = parser.chunks("that wipes out my mornings")
    assert [c["begin"] for c in cs["chunks"]] == [0, 2, 3, 4]
    assert cs["uncovered"] == [1]
    stats = rose.StatModel.load(str(DATA / "stats.txt"))
    fitness = rose.Fitness.load(str(DATA / "fitness.txt"))
    hyps = rose.repair([c["value"] for c in cs["chunks"]], spec, fitness, stats, seed=1)
    assert hyps[0][0] == IDEAL
    assert rose.grade(hyps[0][0], IDEAL) == "Perfect"


def test_mdp_penalty(parser):
    best = min(a["penalty"] for a in parser.parse("mornings blorp are out", mode="mdp", max_penalty=1))
    assert best == 1
    with pytest.raises(rose.RoseError, match="unknown-token"):
        parser.parse("mornings blorp are out", mode="full-parse")


def test_similarity_and_size():
    chunk4 = "((FRAME *SIMPLE-TIME) (TIME-OF-DAY MORNING) (NUMBER PLURAL) (SIMPLE-UNIT-NAME TOD))"
    p, r, f1 = rose.similarity(chunk4, IDEAL)
    assert p == 1.0 and r == 0.5
    assert f1 == pytest.approx(2 / 3)
    assert rose.size(IDEAL) == 7
    assert rose.grade(None, IDEAL) == "NIL"


def test_train_mi(spec):
    stats = rose.train_mi([IDEAL] * 3, spec)
    assert stats.mi("WHEN", "TEMPORAL") > 0


def test_errors(spec):
    with pytest.raises(rose.RoseError, match="syntax"):
        rose.Parser("S -> -> a")
    with pytest.raises(rose.RoseError):
        rose.train_mi([], spec)
