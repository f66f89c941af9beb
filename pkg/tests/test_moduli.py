import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from biharmonic_tori.errors import DomainError
from biharmonic_tori.exactnum import SurdSum, SurdValue
from biharmonic_tori.moduli import (
    enumerate_square,
    exclusion_case_00,
    h_from_ab,
    rect_data,
    rect_feasible,
    rect_h,
    rho_from_ab,
    s5_certificate_data,
    s5_exact_data,
    s5_exists,
    square_data,
    square_data_all,
    square_feasible,
)
from biharmonic_tori.numtheory import r2
from biharmonic_tori.spectral import ExactUnit, eta_pair_from_s, rho_max, validate

F = Fraction


@pytest.mark.parametrize("a, b, h", [(1, 1, F(1, 5)), (F(1, 16), F(9, 16), F(3, 10)), (0, F(1, 4), F(3, 5))])
def test_h_from_ab(a, b, h):
    assert h_from_ab(a, b) == h


@pytest.mark.parametrize("a, b", [(F(1, 4), F(5, 4)), (1, F(1, 2)), (-1, 0)])
def test_h_from_ab_domain(a, b):
    with pytest.raises(DomainError):
        h_from_ab(a, b)


def test_s5_exists_examples():
    res = s5_exists(F(3, 5), 10)
    assert res.status == "certificate" and res.certificate.case == "rho_zero" and res.certificate.b == F(1, 4)
    res = s5_exists(F(1, 5), 10)
    assert (res.certificate.a, res.certificate.b) == (1, 1)
    res = s5_exists(F(1, 2), 10)
    assert h_from_ab(res.certificate.a, res.certificate.b) == F(1, 2)
    assert s5_exists(0.4, 10).status == "unknown"


def test_s5_exists_bounded():
    # h = 1/100 has no certificate with small p, q
    assert s5_exists(F(1, 100), 3).status == "no_within_bound"
    with pytest.raises(DomainError):
        s5_exists(F(3, 2), 5)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 8), st.integers(1, 8), st.integers(1, 8), st.integers(1, 8))
def test_s5_certificate_round_trip(p, q, r, t):
    a, b = F(p * p, q * q), F(r * r, t * t)
    if not 0 <= b - a < 1:
        return
    h = h_from_ab(a, b)
    cert = s5_exists(h, 8).certificate
    assert cert is not None and cert.h == h
    assert validate(s5_certificate_data(cert)).passed


def test_rho_from_ab_endpoint():
    rho, rt, s = rho_from_ab(F(1, 4), F(1, 4))
    assert s == F(1, 2)
    assert rho == pytest.approx(0.95531661812450928, abs=1e-12)
    assert rho == pytest.approx(rho_max(F(1, 2)), abs=1e-12)


@pytest.mark.parametrize("a, b", [(F(1, 9), F(4, 9)), (F(1, 4), F(1)), (F(4, 9), F(1)), (F(1, 16), F(25, 36))])
def test_rho_from_ab_consistency(a, b):
    rho, rt, s = rho_from_ab(a, b)
    h = h_from_ab(a, b)
    assert math.tan(rt) == pytest.approx(-1 / (float(h) * math.tan(rho)), rel=1e-12)
    _, rho2, rt2 = eta_pair_from_s(s, h)
    assert (rho2, rt2) == pytest.approx((rho, rt), abs=1e-12)
    d = s5_exact_data(a, b)
    assert complex(d.eta[0]) == pytest.approx(complex(math.cos(rho), math.sin(rho)), abs=1e-12)
    assert validate(d).passed and d.is_exact


@pytest.mark.parametrize(
    "theta2, reps",
    [(F(1, 2), [(0, 1, F(1, 2), (5,))]), (F(5, 2), [(1, 2, F(3, 10), (5, 7))]), (F(3, 2), []), (F(1, 3), [])],
)
def test_rect_feasible(theta2, reps):
    assert [tuple(r) for r in rect_feasible(theta2).reps] == reps


def test_rect_feasible_many():
    res = rect_feasible(F(25, 2))
    assert [(r.q1, r.q2) for r in res.reps] == [(0, 5), (3, 4)]


def test_rect_half():
    d = rect_data(0, 1, 5)
    assert d.R == (1,) and d.Rp == (F(1, 2), F(1, 2))
    assert d.mu == (ExactUnit.from_ints(0, 1),)
    eta = ExactUnit(SurdValue.sqrt(2), SurdValue.make(1), F(3))
    assert d.eta == (eta, eta.conj())


def test_rect_one_two():
    d = rect_data(1, 2, 5)
    assert d.h == F(3, 10)
    # sqrt(2/7) + i sqrt(5/7); weights from the symbolic solve
    assert d.mu[0].real_part == SurdValue.sqrt(F(2, 7)) and d.mu[0].imag_part == SurdValue.sqrt(F(5, 7))
    assert d.Rp == (F(1, 4), F(3, 4))


def test_rect_seven_midpoint():
    d = rect_data(1, 2, 7, omega=0.0)
    assert d.R == d.Rp == (F(1, 2), F(1, 2))
    assert validate(d).passed


def test_rect_rejections():
    with pytest.raises(DomainError, match="q1 > 0"):
        rect_data(0, 1, 7)
    with pytest.raises(DomainError, match="negative weight"):
        rect_data(1, 2, 5, shape=(2, 1))
    with pytest.raises(DomainError, match="open interval"):
        rect_data(1, 2, 7, omega=math.sqrt(1 - 2 * 0.3))
    with pytest.raises(DomainError):
        rect_data(2, 1, 5)


@pytest.mark.parametrize("q1, q2", [(q1, q2) for q2 in range(1, 21) for q1 in range(q2)])
def test_rect_h_matches_s5(q1, q2):
    a, b = F(q1 - q2, 2 * q2) ** 2, F(q1 + q2, 2 * q2) ** 2
    assert rect_h(q1, q2) == h_from_ab(a, b)


def test_exclusion():
    assert exclusion_case_00(30) == []


def test_square_three():
    res = square_feasible(3)
    assert [(s.s1, s.s2, s.h, s.n_max) for s in res.splits] == [(1, 2, F(1, 3), 7)]
    assert res.part_b == ()
    d = square_data(3, 7)
    assert d.R == d.Rp == (F(1, 2), F(1, 2))
    assert d.mu == (ExactUnit.from_ints(0, 1), ExactUnit.from_ints(1, 0))
    assert d.eta == (ExactUnit.from_ints(1, 1), ExactUnit.from_ints(1, -1))
    with pytest.raises(DomainError):
        square_data(3, 5)
    with pytest.raises(DomainError):
        square_data(3, 11)


def test_square_five_part_b():
    res = square_feasible(5)
    (b,) = res.part_b
    assert (b.p, b.q, b.h, b.n_min, b.n_max) == (1, 2, F(3, 5), 5, r2(1) + r2(4) - 1)
    d = square_data(5, 5)
    # from the symbolic solve of the balance with mu1 = 1, eta = (1, -i)
    assert d.R == (1,) and d.Rp == (F(3, 8), F(5, 8))


def test_square_two_infeasible():
    assert not square_feasible(2).feasible


@pytest.mark.parametrize("S", [3, 5, 25, 65, 125, 130, 170, 325])
def test_square_data_all_valid(S):
    for n, d in square_data_all(S).items():
        assert d.n == n
        assert validate(d).passed, (S, n)
        assert all(w > 0 for w in d.R + d.Rp)
        # integer form: |U| = |V| and <U, V> = 0, exactly
        pairs = [(w, u) for w, u in zip(d.R + d.Rp, d.mu + d.eta)]
        assert all(u.L.is_rational and u.M.is_rational for _, u in pairs)
        assert sum(w * (u.L.coeff ** 2 - u.M.coeff ** 2) for w, u in pairs) == 0
        assert sum(w * u.L.coeff * u.M.coeff for w, u in pairs) == 0


def test_square_reduction_is_deterministic():
    assert square_data(65, 11) == square_data(65, 11)
    big = square_data(125, 21)
    small = square_data(125, 17)
    assert set(small.mu) <= set(big.mu) and set(small.eta) <= set(big.eta)


def test_square_wrong_template_args():
    with pytest.raises(DomainError):
        square_data(5, 7, part_b=(1, 2))
    with pytest.raises(DomainError):
        square_data(5, 5, split=(1, 4))
    with pytest.raises(DomainError):
        square_data(25, 7, split=(2, 23))


def test_enumerate():
    assert [r.S for r in enumerate_square(3).rows] == [3]
    table = enumerate_square(50)
    assert any(r.n_max >= 11 for r in table.rows)
    assert all(0 < s.h < 1 for r in table.rows for s in r.splits)


def test_enumerate_threads(monkeypatch):
    serial = enumerate_square(60)
    monkeypatch.setenv("BIHARMONIC_TORI_THREADS", "4")
    assert enumerate_square(60) == serial
    monkeypatch.setenv("BIHARMONIC_TORI_THREADS", "zero")
    with pytest.raises(DomainError):
        enumerate_square(60)
