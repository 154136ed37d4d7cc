import os
from pathlib import Path

import pytest
from hypothesis import settings

from gdlog.parser import parse_facts, parse_program

CORPUS = Path(__file__).resolve().parent.parent / "corpus"

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def corpus_path(name):
    return CORPUS / name


def load(name):
    path = CORPUS / name
    return parse_program(path.read_text(), str(path))


def facts(name, prog):
    path = CORPUS / name
    return parse_facts(path.read_text(), prog, str(path))


@pytest.fixture
def g0():
    return load("g0.gdl")


@pytest.fixture
def r0(g0):
    return facts("r0.facts", g0)


@pytest.fixture
def salary():
    return load("salary.gdl")


@pytest.fixture
def corp(salary):
    return facts("corp.facts", salary)


@pytest.fixture
def burglary():
    return load("burglary.gdl")
