"""Feasibility deciders and exact constructors for the three torus families.

* S^5 tori, parametrized by rational squares ``a = p^2/q^2``, ``b = r^2/t^2``;
* rectangular tori ``R^2 / (2pi Z x 2pi theta Z)``, living in S^5 and S^7;
* square tori ``R^2 / (2pi a Z)^2`` with ``S = 4a^2`` an integer, in every
  odd dimension for suitable ``S``.

Everything returned here is exact: weights are fractions and directions are
:class:`~biharmonic_tori.spectral.ExactUnit` values, so emitted data can be
validated without tolerances.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, NamedTuple

from .errors import DomainError
from .exactnum import SurdValue, as_rational, format_rational, is_square, rat_sqrt
from .numtheory import first_quadrant_reps, is_sum_of_two_squares, r2
from .spectral import ExactUnit, ImmersionData, s5_family

# ------------------------------------------------------------------ S^5


def h_from_ab(a, b) -> Fraction:
    """Mean curvature of the S^5 torus with parameters (a, b); a = 0 is the rho = 0 case."""
    a, b = as_rational(a), as_rational(b)
    if a < 0:
        raise DomainError("a must be nonnegative")
    u = b - a
    if not 0 <= u < 1:
        raise DomainError("need 0 <= b - a < 1")
    if a == 0 and b == 0:
        raise DomainError("b must be positive")
    return (1 - u * u) / (1 + u * u + 2 * (a + b))


@dataclass(frozen=True)
class S5Certificate:
    a: Fraction
    b: Fraction
    case: Literal["rho_zero", "generic"]
    h: Fraction

    def __post_init__(self) -> None:
        if rat_sqrt(self.b) is None or rat_sqrt(self.a) is None:
            raise DomainError("a and b must be rational squares")
        if self.case == "rho_zero":
            ok = self.a == 0 and 0 < self.b < 1 and self.h == (1 - self.b) / (1 + self.b)
        elif self.case == "generic":
            ok = self.a > 0 and self.h == h_from_ab(self.a, self.b)
        else:
            ok = False
        if not ok:
            raise DomainError(f"inconsistent certificate {self}")

    def to_json(self) -> dict:
        return {
            "a": format_rational(self.a),
            "b": format_rational(self.b),
            "case": self.case,
            "h": format_rational(self.h),
        }


class S5Search(NamedTuple):
    status: Literal["certificate", "no_within_bound", "unknown"]
    certificate: S5Certificate | None = None

    def to_json(self) -> dict:
        out: dict = {"status": self.status}
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_json()
        return out


def _generic_b(h: Fraction, a: Fraction) -> Fraction | None:
    """The b >= a solving h_from_ab(a, b) = h, if it is rational."""
    # (1+h) u^2 + 2h u + (h - 1 + 4ha) = 0 with u = b - a
    root = rat_sqrt(1 - 4 * h * (1 + h) * a) if 1 - 4 * h * (1 + h) * a >= 0 else None
    if root is None:
        return None
    u = (root - h) / (1 + h)
    if not 0 <= u < 1:
        return None
    return a + u


def s5_exists(h, bound: int) -> S5Search:
    """Bounded search for a torus in the S^5 family with mean curvature h.

    The rho = 0 case is decided exactly.  The generic case scans
    ``a = p^2/q^2`` with ``p, q <= bound`` (q outer, p inner) and solves for
    ``b``; it only accepts ``b`` that is again a rational square.  A
    ``no_within_bound`` answer says nothing beyond the bound.  Floating
    point h gives ``unknown``.
    """
    if isinstance(h, float):
        if not 0 < h < 1:
            raise DomainError("mean curvature out of range (0,1)")
        return S5Search("unknown")
    h = as_rational(h)
    if not 0 < h < 1:
        raise DomainError("mean curvature out of range (0,1)")
    if bound < 1:
        raise DomainError("bound must be at least 1")
    b0 = (1 - h) / (1 + h)
    if rat_sqrt(b0) is not None:
        return S5Search("certificate", S5Certificate(Fraction(0), b0, "rho_zero", h))
    seen = set()
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            a = Fraction(p * p, q * q)
            if a in seen:
                continue
            seen.add(a)
            b = _generic_b(h, a)
            if b is not None and rat_sqrt(b) is not None:
                return S5Search("certificate", S5Certificate(a, b, "generic", h))
    return S5Search("no_within_bound")


def _generic_ab(a, b) -> tuple[Fraction, Fraction]:
    a, b = as_rational(a), as_rational(b)
    if a <= 0:
        raise DomainError("a must be positive")
    if not 0 <= b - a < 1:
        raise DomainError("need 0 <= b - a < 1")
    return a, b


def rho_from_ab(a, b) -> tuple[float, float, Fraction]:
    """Angles (rho, rho~) and the weight s = (1 + a - b)/2 of the generic S^5 torus."""
    a, b = _generic_ab(a, b)
    E = (a - b) ** 2 + a + b
    F = 1 + (a - b) ** 2 + 2 * (a + b)
    t = (math.sqrt((1 + a + b) * E) - math.sqrt(b) * float(1 - a + b)) / math.sqrt(a * F)
    rho = 2 * math.atan(t)
    h = float(h_from_ab(a, b))
    rho_t = math.atan(-1.0 / (h * math.tan(rho)))
    return rho, rho_t, (1 + a - b) / 2


def s5_exact_data(a, b) -> ImmersionData:
    """Exact spectral datum of the generic S^5 torus with parameters (a, b)."""
    a, b = _generic_ab(a, b)
    h = h_from_ab(a, b)
    E = (a - b) ** 2 + a + b
    F = 1 + (a - b) ** 2 + 2 * (a + b)
    G = (1 + a + b) * E
    eta1 = ExactUnit(SurdValue.sqrt(b / G) * (1 - a + b), SurdValue.sqrt(a * F / G), Fraction(1))
    eta2 = ExactUnit(SurdValue.sqrt(a / G) * (1 + a - b), -SurdValue.sqrt(b * F / G), Fraction(1))
    s = (1 + a - b) / 2
    return ImmersionData(
        h, (Fraction(1),), (s, 1 - s), (ExactUnit.from_ints(1, 0),), (eta1, eta2),
        label=f"s5 a={format_rational(a)} b={format_rational(b)}",
    )


def s5_certificate_data(cert: S5Certificate) -> ImmersionData:
    if cert.case == "rho_zero":
        return s5_family(cert.h, 0.0)
    return s5_exact_data(cert.a, cert.b)


# ---------------------------------------------------------- rectangles


class RectRep(NamedTuple):
    q1: int
    q2: int
    h: Fraction
    admissible_n: tuple[int, ...]


@dataclass(frozen=True)
class RectFeasibility:
    theta2: Fraction
    reps: tuple[RectRep, ...]

    @property
    def feasible(self) -> bool:
        return bool(self.reps)

    def to_json(self) -> dict:
        return {
            "theta2": format_rational(self.theta2),
            "feasible": self.feasible,
            "reps": [
                {"q1": r.q1, "q2": r.q2, "h": format_rational(r.h), "n": list(r.admissible_n)} for r in self.reps
            ],
        }


def rect_h(q1: int, q2: int) -> Fraction:
    if not 0 <= q1 < q2:
        raise DomainError("need 0 <= q1 < q2")
    return Fraction(q2 * q2 - q1 * q1, 2 * (q1 * q1 + q2 * q2))


def rect_feasible(theta2) -> RectFeasibility:
    """All (q1, q2), 0 <= q1 < q2, with q1^2 + q2^2 = 2 theta^2."""
    theta2 = as_rational(theta2)
    if theta2 <= 0:
        raise DomainError("theta2 must be positive")
    N = 2 * theta2
    if N.denominator != 1:
        return RectFeasibility(theta2, ())
    N = int(N)
    reps = []
    for L, M in first_quadrant_reps(N):
        if L < M:
            reps.append(RectRep(L, M, rect_h(L, M), (5,) if L == 0 else (5, 7)))
    return RectFeasibility(theta2, tuple(reps))


def _rect_units(q1: int, q2: int) -> tuple[ExactUnit, ExactUnit]:
    # (q1 + i theta)/(theta sqrt(l1)) and (q2 + i theta)/(theta sqrt(l2)), scaled by sqrt(2)
    S = q1 * q1 + q2 * q2
    mu = ExactUnit(SurdValue.make(q1, 2), SurdValue.sqrt(S), Fraction(3 * q1 * q1 + q2 * q2))
    eta = ExactUnit(SurdValue.make(q2, 2), SurdValue.sqrt(S), Fraction(3 * q2 * q2 + q1 * q1))
    return mu, eta


def rect_data(q1: int, q2: int, n: int, omega: float | None = None, shape: tuple[int, int] | None = None) -> ImmersionData:
    """Exact datum of the rectangular torus with 2 theta^2 = q1^2 + q2^2 in S^n.

    ``shape`` is ``(m, m')``; it defaults to (1, 2) for n = 5 and (2, 2) for
    n = 7.  The other S^5 shape (2, 1) is accepted only to be rejected: its
    first weight is negative.
    """
    h = rect_h(q1, q2)
    if shape is None:
        shape = {5: (1, 2), 7: (2, 2)}.get(n)
        if shape is None:
            raise DomainError("rectangular tori only live in S^5 and S^7")
    if 2 * sum(shape) - 1 != n:
        raise DomainError(f"shape {shape} does not give dimension {n}")
    mu, eta = _rect_units(q1, q2)
    # sqrt((1-2h)/(1+2h)) = q1/q2
    ratio = Fraction(q1, q2)
    label = f"rect q1={q1} q2={q2} n={n}"
    if shape == (1, 2):
        if omega is not None:
            raise DomainError("omega is only used for n = 7")
        Rp = ((1 - ratio) / 2, (1 + ratio) / 2)
        return ImmersionData(h, (Fraction(1),), Rp, (mu,), (eta, eta.conj()), label=label)
    if shape == (2, 1):
        if q1 == 0:
            raise DomainError("shape (2, 1) needs q1 > 0")
        R1 = (1 - 1 / ratio) / 2
        if R1 <= 0:
            raise DomainError(f"negative weight R1 = {format_rational(R1)} for shape (2, 1)")
        raise AssertionError("unreachable")  # pragma: no cover
    if shape == (2, 2):
        if q1 == 0:
            raise DomainError("n = 7 needs q1 > 0")
        omega = 0.0 if omega is None else float(omega)
        width = math.sqrt(1 - 2 * float(h))
        if not abs(omega) < width:
            raise DomainError(f"omega must lie in the open interval (-{width!r}, {width!r})")
        if omega == 0:
            R = Rp = (Fraction(1, 2), Fraction(1, 2))
        else:
            w1, w2 = omega / width, omega / math.sqrt(1 + 2 * float(h))
            R, Rp = ((1 + w1) / 2, (1 - w1) / 2), ((1 - w2) / 2, (1 + w2) / 2)
        return ImmersionData(h, R, Rp, (mu, mu.conj()), (eta, eta.conj()), label=label)
    raise DomainError(f"unsupported shape {shape}")


def exclusion_case_00(bound: int = 30) -> list[tuple[int, int, int, int]]:
    """Solutions of the (p1^2, p2^2) = (0, 0) case for 0 < q1 < q2 <= bound.

    That case needs integers L, L' with 4 L^2 = 3 q1^2 - q2^2 and
    4 L'^2 = 3 q2^2 - q1^2.  The return value lists every (q1, q2, L, L')
    found; it is expected to be empty.
    """
    out = []
    for q1 in range(1, bound + 1):
        for q2 in range(q1 + 1, bound + 1):
            x, y = 3 * q1 * q1 - q2 * q2, 3 * q2 * q2 - q1 * q1
            if x < 0 or x % 4 or y % 4 or not is_square(x // 4) or not is_square(y // 4):
                continue
            out.append((q1, q2, math.isqrt(x // 4), math.isqrt(y // 4)))
    return out


# -------------------------------------------------------------- squares


class Split(NamedTuple):
    p1: int
    q1: int
    p2: int
    q2: int
    h: Fraction
    n_max: int

    @property
    def s1(self) -> int:
        return self.p1 ** 2 + self.q1 ** 2

    @property
    def s2(self) -> int:
        return self.p2 ** 2 + self.q2 ** 2


class PartB(NamedTuple):
    p: int
    q: int
    h: Fraction
    n_min: int
    n_max: int

    @property
    def template_max(self) -> int:
        """Largest n = 1 (mod 4) reached by the mixed-axis template."""
        return self.n_max - 2


@dataclass(frozen=True)
class SquareFeasibility:
    S: int
    splits: tuple[Split, ...]
    part_b: tuple[PartB, ...] = ()

    @property
    def feasible(self) -> bool:
        return bool(self.splits or self.part_b)

    @property
    def n_max(self) -> int:
        return max([s.n_max for s in self.splits] + [b.n_max for b in self.part_b], default=0)

    def dimensions(self) -> list[int]:
        """Odd n for which a template datum exists."""
        dims = set()
        for s in self.splits:
            dims.update(range(7, s.n_max + 1, 4))
        for b in self.part_b:
            dims.update(range(5, b.template_max + 1, 4))
        return sorted(dims)

    def to_json(self) -> dict:
        return {
            "S": self.S,
            "splits": [
                {"p1": s.p1, "q1": s.q1, "p2": s.p2, "q2": s.q2, "h": format_rational(s.h), "n_max": s.n_max}
                for s in self.splits
            ],
            "part_b": [
                {"p": b.p, "q": b.q, "h": format_rational(b.h), "n_min": b.n_min, "n_max": b.n_max}
                for b in self.part_b
            ],
            "dimensions": self.dimensions(),
        }


def _rep(n: int) -> tuple[int, int]:
    L, M = first_quadrant_reps(n)[0]
    return L, M


def square_feasible(S: int) -> SquareFeasibility:
    if S < 1:
        raise DomainError("S must be a positive integer")
    splits = []
    for s1 in range(1, (S + 1) // 2):
        s2 = S - s1
        if s1 < s2 and is_sum_of_two_squares(s1) and is_sum_of_two_squares(s2):
            p1, q1 = _rep(s1)
            p2, q2 = _rep(s2)
            splits.append(Split(p1, q1, p2, q2, Fraction(s2 - s1, S), r2(s1) + r2(s2) - 1))
    part_b = []
    for p in range(1, math.isqrt(S) + 1):
        rest = S - p * p
        if rest > p * p and is_square(rest):
            q = math.isqrt(rest)
            part_b.append(PartB(p, q, Fraction(q * q - p * p, S), 5, r2(p * p) + r2(q * q) - 1))
    return SquareFeasibility(S, tuple(splits), tuple(part_b))


def _rotation_pairs(n: int, positive_only: bool) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Rotation pairs ((L, M), (M, -L)) from one representative per orbit."""
    reps = first_quadrant_reps(n)
    if positive_only:
        reps = [(L, M) for L, M in reps if L > 0]
    return [((L, M), (M, -L)) for L, M in reps]


def _template_a(S: int, split: Split, n: int) -> ImmersionData:
    s1, s2 = split.s1, split.s2
    mu_pairs = _rotation_pairs(s1, False)
    eta_pairs = _rotation_pairs(s2, False)
    drop = (split.n_max - n) // 4
    # highest-index pairs go first, mu side while it keeps a pair
    while drop:
        if len(mu_pairs) > 1:
            mu_pairs.pop()
        elif len(eta_pairs) > 1:
            eta_pairs.pop()
        else:  # pragma: no cover - guarded by the range check
            raise DomainError("cannot reduce further")
        drop -= 1
    mu = tuple(ExactUnit.from_ints(*v) for pair in mu_pairs for v in pair)
    eta = tuple(ExactUnit.from_ints(*v) for pair in eta_pairs for v in pair)
    R = (Fraction(1, len(mu)),) * len(mu)
    Rp = (Fraction(1, len(eta)),) * len(eta)
    return ImmersionData(split.h, R, Rp, mu, eta, label=f"square S={S} split=({s1},{s2}) n={n}")


def _template_b(S: int, pb: PartB, n: int) -> ImmersionData:
    h = pb.h
    mu_pairs = _rotation_pairs(pb.p * pb.p, True)
    eta_pairs = _rotation_pairs(pb.q * pb.q, True)
    drop = (pb.template_max - n) // 4
    while drop:
        if mu_pairs:
            mu_pairs.pop()
        elif eta_pairs:
            eta_pairs.pop()
        else:  # pragma: no cover
            raise DomainError("cannot reduce further")
        drop -= 1
    p, q = pb.p, pb.q
    # mu_{2a+1} = i mu_{2a}: (L, M) -> (-M, L)
    mu = [ExactUnit.from_ints(p, 0)]
    for (L, M), _ in mu_pairs:
        mu += [ExactUnit.from_ints(L, M), ExactUnit.from_ints(-M, L)]
    eta = [ExactUnit.from_ints(q, 0), ExactUnit.from_ints(0, -q)]
    for first, second in eta_pairs:
        eta += [ExactUnit.from_ints(*first), ExactUnit.from_ints(*second)]
    m, mp = len(mu), len(eta)
    R = [Fraction(1)] if m == 1 else [Fraction(1, 2)] + [Fraction(1, 2 * (m - 1))] * (m - 1)
    # eta_1^2 = 1 and eta_2^2 = -1 must absorb the mu_1 term: R'_2 - R'_1 = c
    c = (1 - h) * R[0] / (1 + h)
    if mp == 2:
        total = Fraction(1)
    elif c < Fraction(1, 2):
        total = Fraction(1, 2)
    else:
        total = (1 + c) / 2
    Rp = [(total - c) / 2, (total + c) / 2]
    if mp > 2:
        Rp += [(1 - total) / (mp - 2)] * (mp - 2)
    return ImmersionData(h, tuple(R), tuple(Rp), tuple(mu), tuple(eta), label=f"square S={S} p={p} q={q} n={n}")


def square_data(S: int, n: int, split: Split | tuple[int, int] | None = None, part_b: PartB | tuple[int, int] | None = None) -> ImmersionData:
    """Exact datum of the square torus with 4a^2 = S in S^n.

    n = 3 (mod 4) uses the rotation-pair template on a split ``S = s1 + s2``
    (given as a :class:`Split` or ``(s1, s2)``; default: the first split
    reaching n).  n = 1 (mod 4) uses the mixed-axis template on
    ``S = p^2 + q^2`` (given as :class:`PartB` or ``(p, q)``).
    """
    if n % 2 == 0 or n < 5:
        raise DomainError("n must be an odd integer >= 5")
    feas = square_feasible(S)
    if n % 4 == 3:
        if part_b is not None:
            raise DomainError("n = 3 (mod 4) uses a split, not (p, q)")
        options = feas.splits
        if split is not None:
            key = (split.s1, split.s2) if isinstance(split, Split) else tuple(split)
            options = tuple(s for s in options if (s.s1, s.s2) == key)
            if not options:
                raise DomainError(f"{key} is not a valid split of {S}")
        if not options:
            raise DomainError(f"S = {S} has no split into two sums of two squares")
        for sp in options:
            if n <= sp.n_max:
                return _template_a(S, sp, n)
        raise DomainError(f"n = {n} exceeds n_max = {max(s.n_max for s in options)}")
    if split is not None:
        raise DomainError("n = 1 (mod 4) uses (p, q), not a split")
    options_b = feas.part_b
    if part_b is not None:
        key = tuple(part_b[:2])
        options_b = tuple(b for b in options_b if (b.p, b.q) == key)
        if not options_b:
            raise DomainError(f"{key} does not satisfy S = p^2 + q^2 with 0 < p < q")
    if not options_b:
        raise DomainError(f"n = {n} = 1 (mod 4) needs S = p^2 + q^2 with 0 < p < q; S = {S} is not")
    for pb in options_b:
        if n <= pb.template_max:
            return _template_b(S, pb, n)
    raise DomainError(f"n = {n} exceeds the largest reachable {max(b.template_max for b in options_b)}")


def square_data_all(S: int) -> dict[int, ImmersionData]:
    """One template datum per reachable dimension."""
    feas = square_feasible(S)
    return {n: square_data(S, n) for n in feas.dimensions()}


def _workers() -> int:
    raw = os.environ.get("BIHARMONIC_TORI_THREADS")
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise DomainError("BIHARMONIC_TORI_THREADS must be a positive integer") from None


@dataclass(frozen=True)
class SquareTable:
    rows: tuple[SquareFeasibility, ...]
    witnesses: dict = field(default_factory=dict)  # odd n -> least S reaching it

    def to_json(self) -> dict:
        return {
            "rows": [r.to_json() for r in self.rows],
            "witnesses": {str(n): S for n, S in sorted(self.witnesses.items())},
        }


def enumerate_square(S_max: int) -> SquareTable:
    """Feasibility of every S <= S_max, plus the least S for each odd n."""
    if S_max < 3:
        raise DomainError("S_max must be at least 3")
    workers = _workers()
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            table = list(pool.map(square_feasible, range(1, S_max + 1)))
    else:
        table = [square_feasible(S) for S in range(1, S_max + 1)]
    rows = tuple(r for r in table if r.feasible)
    witnesses: dict[int, int] = {}
    for row in rows:
        for n in row.dimensions():
            witnesses.setdefault(n, row.S)
    return SquareTable(rows, witnesses)
