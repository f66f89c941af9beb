"""CMC proper-biharmonic flat tori in odd-dimensional spheres."""

__version__ = "0.1.0"

from .errors import DomainError
from .spectral import ExactUnit, AngleUnit, ImmersionData, validate, s5_family, canonicalize, equivalent
from .evaluator import evaluate, verify, Tolerances
from .lattices import Lattice2, PiVector, congruence_basis, is_period, s5_lattice, s5_lattice_rho0, period_lattice
from .moduli import (
    h_from_ab,
    s5_exists,
    rho_from_ab,
    s5_exact_data,
    rect_feasible,
    rect_data,
    square_feasible,
    square_data,
    enumerate_square,
)
from .numtheory import r2, two_square_reps, is_sum_of_two_squares

__all__ = [
    "DomainError",
    "ExactUnit",
    "AngleUnit",
    "ImmersionData",
    "validate",
    "s5_family",
    "canonicalize",
    "equivalent",
    "evaluate",
    "verify",
    "Tolerances",
    "Lattice2",
    "PiVector",
    "congruence_basis",
    "is_period",
    "s5_lattice",
    "s5_lattice_rho0",
    "period_lattice",
    "h_from_ab",
    "s5_exists",
    "rho_from_ab",
    "s5_exact_data",
    "rect_feasible",
    "rect_data",
    "square_feasible",
    "square_data",
    "enumerate_square",
    "r2",
    "two_square_reps",
    "is_sum_of_two_squares",
]
