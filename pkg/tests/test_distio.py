from fractions import Fraction

import pytest

from gdlog.distio import DistributionFormatError, dumps, load_input_pdb, loads
from gdlog.engine import exact_enumerate, monte_carlo, project_distribution
from gdlog.model import Instance

from conftest import facts, load


@pytest.fixture(scope="module")
def exact():
    prog = load("burglary.gdl")
    return project_distribution(exact_enumerate(prog, facts("burglary.facts", prog)))


@pytest.fixture(scope="module")
def empirical():
    prog = load("salary.gdl")
    return project_distribution(monte_carlo(prog, facts("corp.facts", prog), n=50, seed=3))


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_exact_round_trip(exact, fmt):
    back = loads(dumps(exact, fmt))
    assert back.worlds == exact.worlds and back.bottom == exact.bottom


@pytest.mark.parametrize("fmt", ["text", "json"])
def test_empirical_round_trip(empirical, fmt):
    back = loads(dumps(empirical, fmt))
    assert back == empirical
    assert (back.seed, back.budget, back.runs) == (3, 10_000, 50)


def test_text_layout():
    prog = load("g0.gdl")
    d = project_distribution(exact_enumerate(prog, Instance.of(("R", 0))))
    text = dumps(d)
    assert text.splitlines()[0] == "gdlog-distribution 1"
    assert "world 1/2\n  R(0).\n  S(0).\n  S(1).\n" in text
    assert text.endswith("bottom 0/1\n")


def test_empirical_text_has_counts_and_means(empirical):
    text = dumps(empirical)
    assert "runs: 50" in text and "count 1\n" in text
    assert '# mean Res("981-00-8876", "E-Corp", _)[3]' in text


def test_input_pdb():
    prog = load("g0.gdl")
    text = "gdlog-distribution 1\nmode: exact\nworld 1/2\n  R(0).\nworld 1/4\nbottom 1/4\n"
    pdb = load_input_pdb(text, prog)
    assert dict(pdb.worlds) == {Instance.of(("R", 0)): Fraction(1, 2), Instance(): Fraction(1, 4)}
    assert pdb.shortfall == Fraction(1, 4)


@pytest.mark.parametrize("text", [
    "nonsense",
    "gdlog-distribution 1\n  R(0).\n",
    "gdlog-distribution 1\nworld x\n",
    "gdlog-distribution 1\nworld 1/2\n  R(0\n",
    '{"format": "other"}',
])
def test_malformed(text):
    with pytest.raises(DistributionFormatError):
        loads(text)


def test_input_pdb_must_sum_to_one():
    with pytest.raises(DistributionFormatError):
        load_input_pdb("gdlog-distribution 1\nworld 1/2\n  R(0).\nbottom 0\n", load("g0.gdl"))
    with pytest.raises(DistributionFormatError):
        load_input_pdb("gdlog-distribution 1\nworld 1/1\n  R(\"a\").\nbottom 0\n", load("g0.gdl"))
