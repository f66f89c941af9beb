import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from biharmonic_tori.errors import DomainError
from biharmonic_tori.exactnum import SurdValue
from biharmonic_tori.lattices import (
    Lattice2,
    PiVector,
    congruence_basis,
    embedding_check,
    hermite_normal_form,
    index_of,
    is_period,
    period_defect,
    period_lattice,
    rect_ab,
    rect_lattice_index,
    rect_rotated_generators,
    s5_lattice,
    s5_lattice_rho0,
    s5_lattice_rho0_dual,
    sublattice_check,
)
from biharmonic_tori.moduli import rect_data, rho_from_ab, s5_exact_data, square_data
from biharmonic_tori.spectral import s5_family

# generators from the angle formulas at 40 digits (oracle script)
S5_FROZEN = {
    (Fraction(1, 9), Fraction(4, 9)): dict(
        v1=(7.6952989809711846, 0.0),
        v2=(-10.260398641294913, 5.7357372095454764),
        vt1=(-3.8476494904855923, 0.0),
        vt2=(1.2825498301618641, 5.7357372095454764),
    ),
    (Fraction(1, 4), Fraction(1)): dict(
        v1=(8.4589970982320268, 0.0),
        v2=(-8.1673075431205776, 4.7033527515900763),
        vt1=(-4.2294985491160134, 0.0),
        vt2=(0.2916895551114492, 4.7033527515900763),
    ),
}

small_rationals = st.builds(Fraction, st.integers(-40, 40), st.integers(1, 12))


@pytest.mark.parametrize(
    "alpha, beta, basis",
    [(0, 0, [(1, 0), (0, 1)]), (Fraction(1, 3), 0, [(3, 0), (0, 1)]), (Fraction(1, 3), Fraction(1, 2), [(3, 0), (0, 2)]), (Fraction(1, 2), Fraction(1, 2), [(1, 1), (0, 2)])],
)
def test_congruence_examples(alpha, beta, basis):
    assert congruence_basis(alpha, beta) == basis


@settings(max_examples=80, deadline=None)
@given(small_rationals, small_rationals)
def test_congruence_membership(alpha, beta):
    (a, b), (c, d) = congruence_basis(alpha, beta)
    assert a > 0 and d > 0 and c == 0 and 0 <= b < d
    assert index_of([(a, b), (c, d)]) == math.lcm(alpha.denominator, beta.denominator)
    for n in range(-6, 7):
        for m in range(-6, 7):
            member = (n * alpha + m * beta).denominator == 1
            # (n, m) = k (a, b) + l (0, d)
            in_span = n % a == 0 and (m - (n // a) * b) % d == 0
            assert member == in_span


@given(st.lists(st.tuples(st.integers(-30, 30), st.integers(-30, 30)), min_size=1, max_size=5))
def test_hnf_spans_same_group(rows):
    basis = hermite_normal_form(rows)
    if not basis:
        assert all(r == (0, 0) for r in rows)
        return
    det = index_of(basis) if len(basis) == 2 else None
    if det:
        M = np.array(basis, dtype=float)
        for r in rows:
            c = np.linalg.solve(M.T, r)
            assert np.allclose(c, np.round(c))


def test_pivector_arithmetic():
    v = PiVector.of(SurdValue.sqrt(2), 1)
    assert (v + v) == v * 2
    assert (v - v).is_zero()
    assert np.allclose(np.asarray(v), [math.pi * math.sqrt(2), math.pi])


def test_lattice_rejects_dependent():
    with pytest.raises(DomainError):
        Lattice2(((1.0, 2.0), (2.0, 4.0)))


@pytest.mark.parametrize("ab", sorted(S5_FROZEN))
def test_s5_generators_frozen(ab):
    lat = s5_lattice(*ab)
    for name, expected in S5_FROZEN[ab].items():
        assert np.asarray(getattr(lat, name)) == pytest.approx(expected, abs=1e-13)


@pytest.mark.parametrize("ab", [(Fraction(1, 9), Fraction(4, 9)), (Fraction(1, 4), Fraction(1)), (Fraction(4, 9), Fraction(1)), (Fraction(1, 16), Fraction(25, 36))])
def test_s5_lattice_is_periodic(ab):
    lat = s5_lattice(*ab)
    assert lat.v1 == lat.vt1 * lat.alpha
    assert lat.v2 == lat.vt2 + lat.vt1 * lat.beta
    assert lat.basis.same_as(lat.dual_basis)
    exact = s5_exact_data(*ab)
    rho, _, _ = rho_from_ab(*ab)
    family = s5_family(float(exact.h), rho)
    for g in lat.basis.gens:
        assert is_period(exact, g)
        assert is_period(family, g)
    # full lattice, nothing finer
    assert period_lattice(exact).same_as(lat.basis)


def test_s5_lattice_domain():
    with pytest.raises(DomainError):
        s5_lattice(Fraction(1, 4), Fraction(9, 4))
    with pytest.raises(DomainError):
        s5_lattice(Fraction(1, 2), Fraction(1))


def test_rho_zero_lattice():
    lat = s5_lattice_rho0(Fraction(1, 4))
    assert [str(g) for g in lat.gens] == ["pi*(0, sqrt(5))", "pi*(-1/2*sqrt(5), 0)"]
    assert lat.same_as(s5_lattice_rho0_dual(Fraction(1, 4)))
    d = s5_family(Fraction(3, 5), 0.0)
    assert sublattice_check(lat, d)
    assert period_lattice(d).same_as(lat)


def test_is_period_exact_and_float_agree():
    d = rect_data(1, 2, 5)
    theta = PiVector.of(0, SurdValue.sqrt(10))
    assert is_period(d, theta) and is_period(d, np.asarray(theta))
    half = PiVector.of(1, 0)
    assert not is_period(d, half) and period_defect(d, np.asarray(half)) > 0.1


@pytest.mark.parametrize("q1, q2", [(q1, q2) for q2 in range(1, 11) for q1 in range(q2)])
def test_rotated_rectangle_identities(q1, q2):
    lat = s5_lattice(*rect_ab(q1, q2))
    f1, f2 = rect_rotated_generators(q1, q2)
    assert f1 == -lat.v1 - lat.v2
    assert f2 == lat.v1 * q2 + lat.v2 * q1
    assert rect_lattice_index(q1, q2) >= 1


def test_embedding_when_consecutive():
    assert all(embedding_check(q, q + 1) for q in range(8))
    assert not embedding_check(1, 3)
    assert rect_lattice_index(0, 3) == 3


def test_square_is_periodic():
    d = square_data(65, 19)
    side = PiVector.of(SurdValue.sqrt(65), 0)
    assert is_period(d, side) and is_period(d, PiVector(side.y, side.x))


def test_period_lattice_needs_exact():
    with pytest.raises(DomainError):
        period_lattice(s5_family(0.3, 0.2))


def test_period_lattice_rank_deficient():
    # an irrational ratio between the two eigenvalue blocks
    d = s5_family(Fraction(1, 2), 0.0)
    assert period_lattice(d) is None
