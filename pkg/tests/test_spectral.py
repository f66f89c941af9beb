import cmath
import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from biharmonic_tori.errors import DomainError
from biharmonic_tori.exactnum import SurdValue
from biharmonic_tori.spectral import (
    AngleUnit,
    ExactUnit,
    ImmersionData,
    balance_residual,
    canonicalize,
    equivalent,
    eta_pair_from_s,
    perturb_weight,
    rho_max,
    rotate_direction,
    s5_family,
    tilde_rho,
    validate,
)

HALF = Fraction(1, 2)


def rectangle_half():
    eta = ExactUnit(SurdValue.sqrt(2), SurdValue.make(1), Fraction(3))
    return ImmersionData(HALF, (Fraction(1),), (HALF, HALF), (ExactUnit.from_ints(0, 1),), (eta, eta.conj()))


def test_exact_unit_rejects_bad_norm():
    with pytest.raises(DomainError):
        ExactUnit(SurdValue.make(1), SurdValue.make(1), Fraction(3))


def test_exact_unit_parts():
    u = ExactUnit(SurdValue.sqrt(2), SurdValue.make(1), Fraction(3))
    assert complex(u) == pytest.approx((math.sqrt(2) + 1j) / math.sqrt(3), abs=1e-15)
    re, im = u.square_parts()
    assert re == Fraction(1, 3) and im == SurdValue.make(Fraction(2, 3), 2)


def test_rectangle_validates_exactly():
    report = validate(rectangle_half())
    assert report.passed
    assert all(c.exact and c.residual == 0 for c in report.conditions.values())


def test_dimensions():
    d = rectangle_half()
    assert (d.m, d.mp, d.n) == (1, 2, 5)
    assert d.lambda1 + d.lambda2 == 4


@pytest.mark.parametrize("h", [Fraction(0), Fraction(1), Fraction(-1, 3), 1.5])
def test_h_out_of_range(h):
    d = rectangle_half()
    bad = ImmersionData(h, d.R, d.Rp, d.mu, d.eta)
    with pytest.raises(DomainError, match="out of range"):
        validate(bad)


def test_each_condition_can_fail():
    d = rectangle_half()
    one = ExactUnit.from_ints(1, 0)
    assert validate(ImmersionData(HALF, (Fraction(1),), (Fraction(1),), (one,), (one,))).failed() == ["dimension", "f"]
    assert "e" in validate(ImmersionData(HALF, d.R, (HALF, Fraction(1, 3)), d.mu, d.eta)).failed()
    assert "e" in validate(ImmersionData(HALF, d.R, (Fraction(3, 2), -HALF), d.mu, d.eta)).failed()
    # eta and -eta are the same direction
    assert "h" in validate(ImmersionData(HALF, d.R, d.Rp, d.mu, (d.eta[0], -d.eta[0]))).failed()
    assert "f" in validate(ImmersionData(HALF, d.R, (Fraction(1, 4), Fraction(3, 4)), d.mu, d.eta)).failed()


def test_mismatched_lengths():
    d = rectangle_half()
    with pytest.raises(DomainError):
        ImmersionData(HALF, d.R, (Fraction(1),), d.mu, d.eta)


def test_json_round_trip_exact():
    d = rectangle_half()
    again = ImmersionData.loads(d.dumps())
    assert again == d and again.is_exact


def test_json_round_trip_float():
    d = s5_family(0.3, 0.4)
    again = ImmersionData.loads(json.dumps(d.to_json()))
    assert again == d and not again.is_exact


def test_json_missing_field():
    with pytest.raises(DomainError):
        ImmersionData.from_json({"h": "1/2"})


@pytest.mark.parametrize("h", [0.1, 0.3, Fraction(1, 3), 0.8])
def test_tilde_rho_relation(h):
    for rho in (0.1, 0.5, rho_max(h) * 0.99):
        rt = tilde_rho(rho, h)
        assert math.tan(rt) == pytest.approx(-1 / (float(h) * math.tan(rho)), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.02, 0.98), st.floats(0.0, 1.0))
def test_s5_family_balances(h, frac):
    d = s5_family(h, frac * rho_max(h))
    assert abs(balance_residual(d)) < 1e-12
    assert validate(d).passed


@settings(max_examples=40, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.01, 0.99))
def test_eta_pair_solves_balance(h, frac):
    lo, hi = h / (1 + h), 1 / (1 + h)
    s = lo + frac * (hi - lo)
    _, rho, rt = eta_pair_from_s(s, h)
    z = (1 - h) + (1 + h) * s * cmath.exp(2j * rho) + (1 + h) * (1 - s) * cmath.exp(2j * rt)
    assert abs(z) < 1e-12


def test_eta_pair_outside_interval():
    with pytest.raises(DomainError):
        eta_pair_from_s(0.9, 0.5)


def test_s5_rho_zero_is_exact():
    d = s5_family(Fraction(3, 5), 0.0)
    assert d.is_exact and validate(d).passed
    assert d.Rp == (Fraction(3, 8), Fraction(5, 8))


def test_s5_rho_bounds():
    with pytest.raises(DomainError):
        s5_family(0.5, rho_max(0.5) + 0.1)


def test_canonicalize_invariances():
    d = rectangle_half()
    flipped = ImmersionData(d.h, d.R, d.Rp[::-1], tuple(-u for u in d.mu), d.eta[::-1])
    assert equivalent(d, flipped)
    rotated = ImmersionData(
        d.h, d.R, d.Rp,
        tuple(AngleUnit(cmath.phase(complex(u)) + 0.7) for u in d.mu),
        tuple(AngleUnit(cmath.phase(complex(u)) + 0.7) for u in d.eta),
    )
    assert equivalent(d, rotated)
    conj = ImmersionData(d.h, d.R, d.Rp, tuple(u.conj() for u in d.mu), tuple(u.conj() for u in d.eta))
    assert equivalent(d, conj)
    assert validate(canonicalize(d)).passed


def test_not_equivalent_after_rotation_of_one():
    d = rectangle_half()
    assert not equivalent(d, rotate_direction(d, "eta", 0, 0.01))


def test_perturb_weight_renormalizes():
    d = perturb_weight(rectangle_half(), "eta", 0, 0.05)
    assert math.fsum(d.Rp) == pytest.approx(1.0, abs=1e-15)
    assert d.Rp[0] > d.Rp[1]
