"""Generative Datalog: probabilistic Datalog with sampling heads, evaluated by a chase."""

__version__ = "0.1.0"

from .analysis import is_weakly_acyclic
from .chase import (
    PARALLEL, SEQUENTIAL, BudgetExceeded, Terminated, applicable_pairs, check_induced_fds,
    firing_configuration, parallel_step, run_chase, sequential_step,
)
from .engine import (
    EmpiricalDistribution, InputPdb, WorldDistribution, cell_means, exact_enumerate,
    monte_carlo, project_distribution, total_variation,
)
from .kernels import BACKEND, Rng
from .model import Fact, Instance, Program, validate_program
from .parser import parse_facts, parse_program, pretty_program
from .ppdl import Constraint, ZeroMassCondition, condition, parse_constraint
from .translate import to_existential

__all__ = [
    "__version__", "BACKEND", "Rng", "Fact", "Instance", "Program", "validate_program",
    "parse_program", "parse_facts", "pretty_program", "to_existential", "run_chase",
    "sequential_step", "parallel_step", "applicable_pairs", "firing_configuration",
    "check_induced_fds", "Terminated", "BudgetExceeded", "SEQUENTIAL", "PARALLEL",
    "exact_enumerate", "monte_carlo", "project_distribution", "total_variation",
    "cell_means", "WorldDistribution", "EmpiricalDistribution", "InputPdb",
    "is_weakly_acyclic", "Constraint", "parse_constraint", "condition", "ZeroMassCondition",
]
