from fractions import Fraction

from hypothesis import given, strategies as st

from gdlog.model import Fact, Instance
from gdlog.parser import parse_program
from gdlog.translate import COPY, DETERMINISTIC, SAMPLER, project_instance, to_existential

from conftest import load


def test_salary_sampler_and_copy_rules():
    ep = to_existential(load("salary.gdl"))
    assert [r.kind for r in ep.rules] == [DETERMINISTIC] * 3 + [SAMPLER, COPY]
    assert str(ep.rules[3]) == ("exists z: __aux_Res_3(s, c, mu, 10000, z) :- "
                                "AffilEmployee(s, c, d), PayScale(c, d, mu).")
    assert str(ep.rules[4]) == "Res(s, c, z) :- __aux_Res_3(s, c, mu, 10000, z)."
    (aux,) = ep.auxiliary
    assert aux.domains == ("sym", "sym", "real", "int", "real")


def test_deterministic_program_passes_through():
    src = ("extensional E(x: int, y: int).\nintensional T(x: int, y: int).\n"
           "T(x, y) :- E(x, y).\nT(x, z) :- T(x, y), E(y, z).\n")
    prog = parse_program(src)
    ep = to_existential(prog)
    assert [(r.head, r.body) for r in ep.rules] == [(r.head, r.body) for r in prog.rules]
    assert ep.auxiliary == ()


def test_identical_rules_get_distinct_aux_relations():
    ep = to_existential(load("g0.gdl"))
    assert [r.name for r in ep.auxiliary] == ["__aux_S_0", "__aux_S_1"]
    assert set(ep.schema) == {"R", "S", "__aux_S_0", "__aux_S_1"}


def test_translation_is_deterministic():
    prog = load("burglary.gdl")
    assert str(to_existential(prog)) == str(to_existential(load("burglary.gdl")))


def test_existential_variable_avoids_rule_variables():
    prog = parse_program("extensional E(z: int).\nintensional S(z: int, w: int).\n"
                         "S(z, Flip[1/2]) :- E(z).\n")
    sampler = to_existential(prog).rules[0]
    assert sampler.exist_var not in ("z",)


def test_projection_drops_aux_facts():
    prog = load("salary.gdl")
    aux = Fact("__aux_Res_3", ("981-00-8876", "E-Corp", 63000.0, 10000, 62271.0))
    res = Fact("Res", ("981-00-8876", "E-Corp", 62271.0))
    assert project_instance(Instance([aux, res]), program=prog) == Instance([res])
    d = Instance([res])
    assert project_instance(d) == d


def test_projection_of_the_pulled_out_program():
    world = Instance.of(("R", 0), ("A", 0), ("S", 0), ("T", 0))
    assert project_instance(world, {"R", "S", "T"}) == Instance.of(("R", 0), ("S", 0), ("T", 0))


rels = st.sampled_from(["R", "S", "__aux_S_0"])
fact_sets = st.sets(st.builds(lambda r, v: Fact(r, (v,)), rels, st.integers(0, 2)), max_size=6)


@given(fact_sets, fact_sets)
def test_projection_is_idempotent_and_monotone(a, b):
    A, B = Instance(a), Instance(a | b)
    once = project_instance(A)
    assert project_instance(once) == once
    assert project_instance(A) <= project_instance(B)


def test_flip_parameter_becomes_a_column():
    ep = to_existential(load("g0.gdl"))
    assert ep.rules[0].head.terms[0].value == Fraction(1, 2)
