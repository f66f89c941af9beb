"""Period lattices of the immersions and integer congruence subgroups.

Exact plane vectors are stored as :class:`PiVector`, i.e. ``pi * (x, y)``
with surd components, so closed-form generators can be compared
structurally.  Integer bases are kept in Hermite normal form
``[[a, b], [0, d]]`` with ``a, d > 0`` and ``0 <= b < d``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import DomainError
from .exactnum import SurdSum, SurdValue, as_rational, rat_sqrt
from .spectral import ExactUnit, ImmersionData

PERIOD_TOL = 1e-9


@dataclass(frozen=True)
class PiVector:
    """The plane vector ``pi * (x, y)`` with exact surd components."""

    x: SurdSum
    y: SurdSum

    @classmethod
    def of(cls, x, y) -> PiVector:
        return cls(SurdSum.of(x), SurdSum.of(y))

    def __add__(self, other: PiVector) -> PiVector:
        return PiVector(self.x + other.x, self.y + other.y)

    def __sub__(self, other: PiVector) -> PiVector:
        return PiVector(self.x - other.x, self.y - other.y)

    def __neg__(self) -> PiVector:
        return PiVector(-self.x, -self.y)

    def __mul__(self, k) -> PiVector:
        return PiVector(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __array__(self, dtype=None, copy=None) -> np.ndarray:
        return np.array([math.pi * float(self.x), math.pi * float(self.y)], dtype=dtype)

    def is_zero(self) -> bool:
        return self.x.is_zero() and self.y.is_zero()

    def __str__(self) -> str:
        return f"pi*({self.x}, {self.y})"


Vector = Union[PiVector, Sequence[float], np.ndarray]


def as_float_vector(v: Vector) -> np.ndarray:
    return np.asarray(v, dtype=float)


@dataclass(frozen=True)
class Lattice2:
    """Discrete subgroup of the plane spanned by 0, 1 or 2 generators."""

    gens: tuple

    def __post_init__(self) -> None:
        gens = tuple(self.gens)
        object.__setattr__(self, "gens", gens)
        if len(gens) > 2:
            raise DomainError("at most two generators")
        mats = [as_float_vector(g) for g in gens]
        if any(np.linalg.norm(g) == 0 for g in mats):
            raise DomainError("generators must be nonzero")
        if len(mats) == 2 and abs(np.linalg.det(np.array(mats))) < 1e-12 * np.prod([np.linalg.norm(g) for g in mats]):
            raise DomainError("generators must be linearly independent")

    @property
    def rank(self) -> int:
        return len(self.gens)

    def matrix(self) -> np.ndarray:
        """Generators as rows, in floating point."""
        return np.array([as_float_vector(g) for g in self.gens])

    def covolume(self) -> float:
        if self.rank != 2:
            return math.inf
        return abs(float(np.linalg.det(self.matrix())))

    def coordinates(self, v: Vector) -> np.ndarray:
        return np.linalg.solve(self.matrix().T, as_float_vector(v))

    def contains(self, v: Vector, tol: float = 1e-9) -> bool:
        c = self.coordinates(v)
        return bool(np.all(np.abs(c - np.round(c)) < tol))

    def same_as(self, other: Lattice2, tol: float = 1e-9) -> bool:
        """Both generator sets span the same group."""
        if self.rank != 2 or other.rank != 2:
            raise DomainError("comparison needs rank-2 lattices")
        return all(self.contains(g, tol) for g in other.gens) and all(other.contains(g, tol) for g in self.gens)

    def describe(self) -> list[str]:
        out = []
        for g in self.gens:
            if isinstance(g, PiVector):
                out.append(str(g))
            else:
                a, b = as_float_vector(g)
                out.append(f"({a:.15g}, {b:.15g})")
        return out


# ------------------------------------------------------------ integer HNF


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[tuple[int, int]]:
    """Row HNF of the subgroup of Z^2 generated by ``rows``."""
    rows = [list(map(int, r)) for r in rows if any(r)]
    if not rows:
        return []
    # first column: fold everything into one pivot row
    pivot = [0, 0]
    rest = []
    for r in rows:
        if r[0] == 0:
            rest.append(r)
            continue
        if pivot[0] == 0:
            pivot = r
            continue
        g, s, t = _xgcd(pivot[0], r[0])
        new_pivot = [s * pivot[0] + t * r[0], s * pivot[1] + t * r[1]]
        a, b = pivot[0] // g, r[0] // g
        rest.append([b * pivot[0] - a * r[0], b * pivot[1] - a * r[1]])
        pivot = new_pivot
    d = 0
    for r in rest:
        d = math.gcd(d, r[1])
    if pivot[0] < 0:
        pivot = [-pivot[0], -pivot[1]]
    if pivot[0] == 0:
        return [(0, d)] if d else []
    if d == 0:
        return [(pivot[0], pivot[1])]
    return [(pivot[0], pivot[1] % d), (0, d)]


def congruence_basis(alpha, beta) -> list[tuple[int, int]]:
    """HNF basis of ``{(n, m) in Z^2 : n*alpha + m*beta in Z}``.

    With ``M`` the common denominator and ``a = alpha*M``, ``b = beta*M``,
    the subgroup is the kernel of ``(n, m) -> n*a + m*b (mod M)``.  Its
    index is the determinant of the returned basis.
    """
    alpha, beta = as_rational(alpha), as_rational(beta)
    M = math.lcm(alpha.denominator, beta.denominator)
    a, b = int(alpha * M), int(beta * M)
    g = math.gcd(b, M)
    # smallest n > 0 for which n*a is divisible by g, then solve for m
    n0 = g // math.gcd(g, a)
    modulus = M // g
    if modulus == 1:
        m0 = 0
    else:
        m0 = (-(n0 * a) // g) * pow(b // g, -1, modulus) % modulus
    return hermite_normal_form([(n0, m0), (0, modulus), (M, 0)])


def index_of(basis: Sequence[Sequence[int]]) -> int:
    if len(basis) < 2:
        return 0
    (a, b), (c, d) = basis
    return abs(a * d - b * c)


# ------------------------------------------------------------- periodicity


def _wave_vectors(data: ImmersionData) -> np.ndarray:
    h = float(data.h)
    out = []
    for root, units in ((math.sqrt(2 * (1 - h)), data.mu_complex), (math.sqrt(2 * (1 + h)), data.eta_complex)):
        for u in units:
            out.append((root * u.imag, root * u.real))
    return np.array(out)


def period_defect(data: ImmersionData, v: Vector) -> float:
    """Largest distance to the nearest integer of the phase advances / 2pi."""
    turns = _wave_vectors(data) @ as_float_vector(v) / (2 * math.pi)
    return float(np.max(np.abs(turns - np.round(turns))))


def _exact_wave_vectors(data: ImmersionData) -> list[tuple[SurdValue, SurdValue]]:
    out = []
    for scale, units in ((1 - data.h, data.mu), (1 + data.h, data.eta)):
        root = SurdValue.sqrt(2 * scale)
        for u in units:
            out.append((root * u.imag_part, root * u.real_part))
    return out


def _is_period_exact(data: ImmersionData, v: PiVector) -> bool:
    for kx, ky in _exact_wave_vectors(data):
        # (k . pi v) / 2pi = (k . v) / 2
        turns = (v.x * kx + v.y * ky) * Fraction(1, 2)
        if not turns.is_rational() or turns.rational_value().denominator != 1:
            return False
    return True


def is_period(data: ImmersionData, v: Vector, tol: float = PERIOD_TOL) -> bool:
    """Whether ``psi(z + v) == psi(z)`` for all z.

    Exact when the data are exact and ``v`` is a :class:`PiVector`;
    otherwise each congruence is tested to ``tol``.
    """
    if isinstance(v, PiVector) and data.is_exact:
        return _is_period_exact(data, v)
    return period_defect(data, v) < tol


def sublattice_check(lattice: Lattice2, data: ImmersionData, tol: float = PERIOD_TOL) -> bool:
    """Whether psi descends to the torus ``R^2 / lattice``."""
    if lattice.rank != 2:
        raise DomainError("sublattice_check needs a rank-2 lattice")
    return all(is_period(data, g, tol) for g in lattice.gens)


def _rationalize(x: float, max_den: int) -> Fraction:
    return Fraction(x).limit_denominator(max_den)


def period_lattice(data: ImmersionData, max_den: int = 10**6) -> Lattice2 | None:
    """Full period lattice of exactly given data, or ``None`` if it has rank < 2.

    The wave vectors (one per direction) must generate a rank-2 lattice in
    the frequency plane; rational coordinates are guessed numerically and
    then confirmed exactly.  The periods form the dual lattice scaled by 2pi.
    """
    if not data.is_exact:
        raise DomainError("period lattices are only extracted from exact data")
    waves = _exact_wave_vectors(data)
    floats = np.array([[float(a), float(b)] for a, b in waves])
    base = None
    for i in range(len(waves)):
        for j in range(i + 1, len(waves)):
            det = np.linalg.det(floats[[i, j]])
            if abs(det) > 1e-9:
                base = (i, j)
                break
        if base:
            break
    if base is None:
        return None
    B = floats[list(base)]
    coords = []
    for (kx, ky), f in zip(waves, floats):
        c1, c2 = (_rationalize(c, max_den) for c in np.linalg.solve(B.T, f))
        (ax, ay), (bx, by) = waves[base[0]], waves[base[1]]
        if SurdSum.of(kx) != SurdSum.of(ax * c1) + SurdSum.of(bx * c2):
            return None
        if SurdSum.of(ky) != SurdSum.of(ay * c1) + SurdSum.of(by * c2):
            return None
        coords.append((c1, c2))
    den = math.lcm(*(c.denominator for pair in coords for c in pair))
    hnf = hermite_normal_form([(int(c1 * den), int(c2 * den)) for c1, c2 in coords])
    U = np.array(hnf, dtype=float) / den @ B
    periods = 2 * math.pi * np.linalg.inv(U)
    return Lattice2((periods[:, 0], periods[:, 1]))


# ---------------------------------------------------------- S^5 generators


class S5Lattice(NamedTuple):
    v1: PiVector
    v2: PiVector
    vt1: PiVector
    vt2: PiVector
    alpha: Fraction  # constraint coefficient on v1
    beta: Fraction  # constraint coefficient on v2
    int_basis: list  # HNF rows (n, m) meaning n*v1 + m*v2
    basis: Lattice2
    dual_alpha: Fraction  # on vt1
    dual_beta: Fraction  # on vt2
    dual_int_basis: list  # rows (k, m) meaning k*vt1 + m*vt2
    dual_basis: Lattice2


def _need_square(q: Fraction, name: str) -> Fraction:
    root = rat_sqrt(q)
    if root is None or root <= 0:
        raise DomainError(f"{name} = {q} is not the square of a positive rational")
    return root


def s5_lattice(a, b) -> S5Lattice:
    """Closed-form period lattice of the generic S^5 torus with parameters (a, b)."""
    a, b = as_rational(a), as_rational(b)
    if a <= 0:
        raise DomainError("a must be positive")
    if not 0 <= b - a < 1:
        raise DomainError("no torus: need 0 <= b - a < 1")
    pq = _need_square(a, "a")  # p/q
    rt = _need_square(b, "b")  # r/t
    E = (a - b) ** 2 + a + b
    F = 1 + (a - b) ** 2 + 2 * (a + b)
    v1 = PiVector.of(SurdValue.sqrt(E / a), 0)
    v2 = PiVector.of(SurdValue.sqrt(b / (a * E)) * (-(1 - a + b)), SurdValue.sqrt(F / E))
    # sin(tilde rho) < 0, so both x-components below carry that sign;
    # this is what makes v1 = A*vt1 and v2 = vt2 + B*vt1 hold with A < 0.
    vt1 = PiVector.of(-SurdValue.sqrt(E / b), 0)
    vt2 = PiVector.of(SurdValue.sqrt(a / (b * E)) * (1 + a - b), SurdValue.sqrt(F / E))
    # m q/p - n qr/(pt) in Z   and   m t/r - k pt/(qr) in Z
    alpha, beta = -rt / pq, 1 / pq
    dual_alpha, dual_beta = -pq / rt, 1 / rt
    int_basis = congruence_basis(alpha, beta)
    dual_int_basis = congruence_basis(dual_alpha, dual_beta)
    basis = Lattice2(tuple(v1 * n + v2 * m for n, m in int_basis))
    dual_basis = Lattice2(tuple(vt1 * k + vt2 * m for k, m in dual_int_basis))
    return S5Lattice(v1, v2, vt1, vt2, alpha, beta, int_basis, basis, dual_alpha, dual_beta, dual_int_basis, dual_basis)


def s5_lattice_rho0(b) -> Lattice2:
    """Period lattice of the rho = 0 member, h = (1-b)/(1+b): generators r*v2, v1."""
    b = as_rational(b)
    if not 0 < b < 1:
        raise DomainError("b must lie in (0, 1)")
    rt = _need_square(b, "b")
    v1 = PiVector.of(-SurdValue.sqrt(1 + b), 0)
    v2 = PiVector.of(0, SurdValue.sqrt((1 + b) / b))
    return Lattice2((v2 * rt.numerator, v1))


def s5_lattice_rho0_dual(b) -> Lattice2:
    """Same lattice as :func:`s5_lattice_rho0` written as t*vt2, v1."""
    b = as_rational(b)
    rt = _need_square(b, "b")
    v1 = PiVector.of(-SurdValue.sqrt(1 + b), 0)
    vt2 = PiVector.of(0, SurdValue.sqrt(1 + b))
    return Lattice2((vt2 * rt.denominator, v1))


# ---------------------------------------------------- rectangular tori in S^5


def rect_ab(q1: int, q2: int) -> tuple[Fraction, Fraction]:
    """The (a, b) of the S^5 family matching the rectangular torus (q1, q2)."""
    if not 0 <= q1 < q2:
        raise DomainError("need 0 <= q1 < q2")
    return Fraction(q1 - q2, 2 * q2) ** 2, Fraction(q1 + q2, 2 * q2) ** 2


def rect_rotated_generators(q1: int, q2: int) -> tuple[PiVector, PiVector]:
    """Generators (2pi, 0), (0, 2pi theta) of the rectangular lattice after rotation.

    The rotation has cosine ``q1 sqrt(2) / sqrt(D)`` and sine
    ``-sqrt(q1^2 + q2^2) / sqrt(D)``, ``D = 3 q1^2 + q2^2``; it aligns the
    rectangular torus with the frame of the S^5 family.
    """
    if not 0 <= q1 < q2:
        raise DomainError("need 0 <= q1 < q2")
    S = q1 * q1 + q2 * q2
    D = 3 * q1 * q1 + q2 * q2
    c = SurdValue.sqrt(Fraction(2 * q1 * q1, D))
    s = SurdValue.sqrt(Fraction(S, D))
    f1 = (SurdValue.make(2), SurdValue.make(0))
    f2 = (SurdValue.make(0), SurdValue.sqrt(2 * S))
    rot = lambda f: PiVector.of(SurdSum.of(c * f[0]) + SurdSum.of(s * f[1]), SurdSum.of(-s * f[0]) + SurdSum.of(c * f[1]))
    return rot(f1), rot(f2)


def _coords_in(v: PiVector, e1: PiVector, e2: PiVector) -> tuple[int, int]:
    n, m = (round(c) for c in np.linalg.solve(np.array([np.asarray(e1), np.asarray(e2)]).T, np.asarray(v)))
    if e1 * n + e2 * m != v:
        raise DomainError(f"{v} is not an integer combination of the frame")
    return int(n), int(m)


def rect_lattice_index(q1: int, q2: int) -> int:
    """Index of the rotated rectangular lattice inside the full period lattice."""
    a, b = rect_ab(q1, q2)
    lat = s5_lattice(a, b)
    f1, f2 = rect_rotated_generators(q1, q2)
    c1 = _coords_in(f1, lat.v1, lat.v2)
    c2 = _coords_in(f2, lat.v1, lat.v2)
    for n, m in (c1, c2):
        if (n * lat.alpha + m * lat.beta).denominator != 1:
            raise DomainError("rectangular generator is not a period")
    sub_index = abs(c1[0] * c2[1] - c1[1] * c2[0])
    full_index = index_of(lat.int_basis)
    assert sub_index % full_index == 0
    return sub_index // full_index


def embedding_check(q1: int, q2: int) -> bool:
    """Whether the rectangular torus (q1, q2) is embedded, i.e. has index 1."""
    return rect_lattice_index(q1, q2) == 1
