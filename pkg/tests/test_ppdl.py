from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from gdlog.engine import EmpiricalDistribution, exact_enumerate, monte_carlo, project_distribution
from gdlog.model import Fact, Instance
from gdlog.parser import ParseError, parse_facts
from gdlog.ppdl import (
    Constraint, ConstraintError, ZeroMassCondition, condition, parse_constraint, world_satisfies,
)

from conftest import corpus_path, facts, load
import oracles


@pytest.fixture(scope="module")
def burglary_dist():
    prog = load("burglary.gdl")
    return project_distribution(exact_enumerate(prog, facts("burglary.facts", prog)))


def test_alarm_world_satisfies():
    c = parse_constraint("Goal :- Alarm(x).")
    assert world_satisfies(Instance.of(("Alarm", "h1")), c)
    assert not world_satisfies(Instance.of(("Trig", "h1", 0)), c)


def test_tautology_holds_everywhere():
    c = parse_constraint("Top.\nGoal :- Top.")
    assert world_satisfies(Instance(), c)


def test_negation_and_comparisons():
    c = parse_constraint('Quiet(x) :- Unit(x, _), not Alarm(x).\n'
                         'Goal :- Quiet(x), x != "b1".')
    w = Instance.of(("Unit", "h1", "c1"), ("Unit", "b1", "c1"), ("Alarm", "b1"))
    assert world_satisfies(w, c)
    assert not world_satisfies(Instance.of(("Unit", "b1", "c1")), c)
    assert not world_satisfies(Instance.of(("Unit", "h1", "c1"), ("Alarm", "h1")), c)
    c2 = parse_constraint("Goal :- City(_, r), r < 1/4.")
    assert world_satisfies(Instance.of(("City", "c1", Fraction(1, 5))), c2)
    assert not world_satisfies(Instance.of(("City", "c1", Fraction(1, 2))), c2)


@pytest.mark.parametrize("text", [
    "Alarm(x) :- Trig(x, 1).",                 # no Goal
    "Goal(x) :- Alarm(x).",                    # Goal not nullary
    "Goal :- Alarm(x), not Trig(y, 1).",       # unsafe negation
    "Goal :- A.\nA :- B.\nB :- A.",            # recursive
    "Goal :- x > 1.",                          # unsafe comparison
])
def test_bad_constraints(text):
    with pytest.raises(ParseError):
        parse_constraint(text)


def test_dist_term_in_constraint():
    with pytest.raises((ParseError, ConstraintError)):
        parse_constraint("Goal :- A(x).\nB(Flip[1/2]) :- A(x).")


def test_conditioning_matches_brute_force(burglary_dist):
    c = parse_constraint(corpus_path("alarm.cstr").read_text())
    post = condition(burglary_dist, c)
    want = oracles.condition_on(oracles.burglary(["h1"], ["b1"]), oracles.has_alarm("h1"))
    assert post.worlds == want
    assert post.total == 1 and post.bottom == 0


def test_three_units():
    prog = load("burglary.gdl")
    d0 = parse_facts('City("c1", 1/5).\nHouse("h1", "c1").\nHouse("h2", "c1").\n'
                     'Business("b1", "c1").\n', prog)
    dist = project_distribution(exact_enumerate(prog, d0))
    post = condition(dist, parse_constraint('Goal :- Alarm("h1").'))
    want = oracles.condition_on(oracles.burglary(["h1", "h2"], ["b1"]), oracles.has_alarm("h1"))
    assert post.worlds == want


def test_zero_mass(burglary_dist):
    with pytest.raises(ZeroMassCondition):
        condition(burglary_dist, parse_constraint('Goal :- Alarm("nowhere").'))


def test_tautology_is_identity(burglary_dist):
    post = condition(burglary_dist, parse_constraint("Top.\nGoal :- Top."))
    assert post.worlds == burglary_dist.worlds


def test_conditioning_commutes_with_projection():
    prog = load("burglary.gdl")
    full = exact_enumerate(prog, facts("burglary.facts", prog))
    c = parse_constraint('Goal :- Alarm("b1").')
    a = project_distribution(condition(full, c))
    b = condition(project_distribution(full), c)
    assert a.worlds == b.worlds


def test_bottom_never_satisfies():
    prog = load("infloop.gdl")
    d = exact_enumerate(prog, Instance.of(("R", 0)), max_depth=5)
    with pytest.raises(ZeroMassCondition):
        condition(d, parse_constraint("Top.\nGoal :- Top."))


def test_empirical_conditioning():
    prog = load("burglary.gdl")
    emp = project_distribution(monte_carlo(prog, facts("burglary.facts", prog), n=3000, seed=2))
    post = condition(emp, parse_constraint('Goal :- Alarm("h1").'))
    assert isinstance(post, EmpiricalDistribution)
    assert post.runs == sum(emp.worlds[w] for w in post.worlds)
    assert all(Fact("Alarm", ("h1",)) in w for w in post.worlds)


@given(st.sets(st.sampled_from(["h1", "b1", "x"]), max_size=3))
def test_goal_iff_some_alarm(alarms):
    w = Instance.of(*[("Alarm", a) for a in alarms])
    assert world_satisfies(w, parse_constraint("Goal :- Alarm(x).")) == bool(alarms)


def test_constraint_str_round_trips():
    c = parse_constraint('Goal :- Alarm("h1"), not Trig("h1", 0).')
    assert parse_constraint(str(c)) == c
    assert isinstance(c, Constraint)
