"""Spectral data of CMC proper-biharmonic immersions of the plane in odd spheres.

An :class:`ImmersionData` holds ``(h, R, R', mu, eta)``.  The immersion is

    psi(x, y) = sum_k sqrt(R_k/2) (cos t_k, sin t_k) (+) sum_j sqrt(R'_j/2) (cos s_j, sin s_j)

with ``t_k = sqrt(l1) Im(mu_k z)`` and ``s_j = sqrt(l2) Im(eta_j z)``, where
``l1 = 2(1-h)`` and ``l2 = 2(1+h)`` and the frame is the standard basis of
``R^(n+1)``, ``n = 2(m + m') - 1``.

Unit complex numbers come in two flavours: :class:`ExactUnit`, which keeps
``(L + iM)/sqrt(norm2)`` with surd ``L, M`` so that the algebraic conditions
can be decided exactly, and :class:`AngleUnit` for continuous families.
"""
from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import cached_property
from typing import Any, NamedTuple, Sequence, Union

from .errors import DomainError
from .exactnum import (
    SurdSum,
    SurdValue,
    as_rational,
    format_rational,
    format_surd,
    parse_rational,
    parse_surd,
)

DISTINCT_TOL = 1e-12

Weight = Union[Fraction, float]


@dataclass(frozen=True)
class ExactUnit:
    """The unit complex number ``(L + iM) / sqrt(norm2)``."""

    L: SurdValue
    M: SurdValue
    norm2: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.L, SurdValue):
            object.__setattr__(self, "L", SurdValue.make(self.L))
        if not isinstance(self.M, SurdValue):
            object.__setattr__(self, "M", SurdValue.make(self.M))
        object.__setattr__(self, "norm2", as_rational(self.norm2))
        if self.norm2 <= 0:
            raise DomainError("norm2 must be positive")
        if self.L.square() + self.M.square() != self.norm2:
            raise DomainError(f"L^2 + M^2 != norm2 for ({self.L}, {self.M}, {self.norm2})")

    @classmethod
    def from_ints(cls, L: int, M: int) -> ExactUnit:
        return cls(SurdValue.make(L), SurdValue.make(M), Fraction(L * L + M * M))

    @property
    def real_part(self) -> SurdValue:
        return self.L / SurdValue.sqrt(self.norm2)

    @property
    def imag_part(self) -> SurdValue:
        return self.M / SurdValue.sqrt(self.norm2)

    def __complex__(self) -> complex:
        return complex(float(self.real_part), float(self.imag_part))

    def square_parts(self) -> tuple[Fraction, SurdValue]:
        """Real and imaginary parts of the square, exactly."""
        re = (self.L.square() - self.M.square()) / self.norm2
        im = (self.L * self.M * 2) / self.norm2
        return re, im

    def conj(self) -> ExactUnit:
        return ExactUnit(self.L, -self.M, self.norm2)

    def __neg__(self) -> ExactUnit:
        return ExactUnit(-self.L, -self.M, self.norm2)

    def to_json(self) -> dict:
        return {"L": _surd_json(self.L), "M": _surd_json(self.M), "norm2": format_rational(self.norm2)}


@dataclass(frozen=True)
class AngleUnit:
    """The unit complex number ``exp(i * angle)``."""

    angle: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.angle):
            raise DomainError("angle must be finite")

    def __complex__(self) -> complex:
        return cmath.exp(1j * self.angle)

    def conj(self) -> AngleUnit:
        return AngleUnit(-self.angle)

    def __neg__(self) -> AngleUnit:
        return AngleUnit(self.angle + math.pi)

    def to_json(self) -> dict:
        return {"angle": self.angle}


UnitComplex = Union[ExactUnit, AngleUnit]


def _surd_json(value: SurdValue) -> int | str:
    if value.is_rational and value.coeff.denominator == 1:
        return int(value.coeff)
    return format_surd(value)


def unit_from_json(obj: dict) -> UnitComplex:
    if "angle" in obj:
        return AngleUnit(float(obj["angle"]))
    try:
        return ExactUnit(parse_surd(obj["L"]), parse_surd(obj["M"]), parse_rational(str(obj["norm2"])))
    except KeyError as exc:
        raise DomainError(f"unit complex entry missing field {exc}") from None


def _weight_json(w: Weight) -> str | float:
    return format_rational(w) if isinstance(w, Fraction) else float(w)


def _weight_from_json(value: Any) -> Weight:
    if isinstance(value, str):
        return parse_rational(value)
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    if isinstance(value, float):
        return value
    raise DomainError(f"bad weight {value!r}")


def _coerce_h(h: Any) -> Weight:
    if isinstance(h, (Fraction, int, str)) and not isinstance(h, bool):
        return as_rational(h)
    return float(h)


@dataclass(frozen=True)
class ImmersionData:
    """Spectral datum ``(h, R, R', mu, eta)`` of an immersion in S^n."""

    h: Weight
    R: tuple[Weight, ...]
    Rp: tuple[Weight, ...]
    mu: tuple[UnitComplex, ...]
    eta: tuple[UnitComplex, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", _coerce_h(self.h))
        for name in ("R", "Rp", "mu", "eta"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        object.__setattr__(
            self, "R", tuple(w if isinstance(w, (Fraction, float)) else _coerce_h(w) for w in self.R)
        )
        object.__setattr__(
            self, "Rp", tuple(w if isinstance(w, (Fraction, float)) else _coerce_h(w) for w in self.Rp)
        )
        if len(self.R) != len(self.mu) or len(self.Rp) != len(self.eta):
            raise DomainError("each direction needs exactly one weight")
        if not self.mu or not self.eta:
            raise DomainError("both eigenvalue blocks must be nonempty")
        for u in self.mu + self.eta:
            if not isinstance(u, (ExactUnit, AngleUnit)):
                raise DomainError(f"not a unit complex number: {u!r}")

    @property
    def m(self) -> int:
        return len(self.mu)

    @property
    def mp(self) -> int:
        return len(self.eta)

    @property
    def n(self) -> int:
        return 2 * (self.m + self.mp) - 1

    @property
    def lambda1(self) -> Weight:
        return 2 * (1 - self.h)

    @property
    def lambda2(self) -> Weight:
        return 2 * (1 + self.h)

    @property
    def is_exact(self) -> bool:
        return (
            isinstance(self.h, Fraction)
            and all(isinstance(w, Fraction) for w in self.R + self.Rp)
            and all(isinstance(u, ExactUnit) for u in self.mu + self.eta)
        )

    @cached_property
    def mu_complex(self) -> tuple[complex, ...]:
        return tuple(complex(u) for u in self.mu)

    @cached_property
    def eta_complex(self) -> tuple[complex, ...]:
        return tuple(complex(u) for u in self.eta)

    def to_json(self) -> dict:
        return {
            "h": _weight_json(self.h),
            "R": [_weight_json(w) for w in self.R],
            "Rp": [_weight_json(w) for w in self.Rp],
            "mu": [u.to_json() for u in self.mu],
            "eta": [u.to_json() for u in self.eta],
        }

    def dumps(self, **kwargs) -> str:
        return json.dumps(self.to_json(), **kwargs)

    @classmethod
    def from_json(cls, obj: dict) -> ImmersionData:
        try:
            return cls(
                h=_weight_from_json(obj["h"]),
                R=[_weight_from_json(w) for w in obj["R"]],
                Rp=[_weight_from_json(w) for w in obj["Rp"]],
                mu=[unit_from_json(u) for u in obj["mu"]],
                eta=[unit_from_json(u) for u in obj["eta"]],
            )
        except KeyError as exc:
            raise DomainError(f"immersion data missing field {exc}") from None

    @classmethod
    def loads(cls, text: str) -> ImmersionData:
        return cls.from_json(json.loads(text))


# ---------------------------------------------------------------- validation


class ConditionResult(NamedTuple):
    passed: bool
    residual: float
    exact: bool
    detail: str = ""


@dataclass
class ConditionReport:
    conditions: dict[str, ConditionResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions.values())

    def failed(self) -> list[str]:
        return [k for k, c in self.conditions.items() if not c.passed]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "conditions": {
                k: {"passed": c.passed, "residual": c.residual, "exact": c.exact, "detail": c.detail}
                for k, c in self.conditions.items()
            },
        }

    def __str__(self) -> str:
        lines = []
        for key, c in self.conditions.items():
            mode = "exact" if c.exact else "float"
            status = "pass" if c.passed else "FAIL"
            lines.append(f"({key:>9}) {status}  {mode:5}  residual={c.residual:.3e}  {c.detail}")
        lines.append("overall: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)


def _check_h(h: Weight) -> None:
    if not 0 < h < 1:
        raise DomainError("mean curvature out of range (0,1)")


def _check_weights(weights: Sequence[Weight], tol: float) -> ConditionResult:
    exact = all(isinstance(w, Fraction) for w in weights)
    positive = all(w > 0 for w in weights)
    if exact:
        total = sum(weights, Fraction(0))
        residual = abs(float(total - 1))
        ok = total == 1
    else:
        residual = abs(math.fsum(float(w) for w in weights) - 1.0)
        ok = residual < tol
    detail = "" if positive else "nonpositive weight"
    return ConditionResult(ok and positive, residual, exact, detail)


def _balance_exact(data: ImmersionData) -> tuple[Fraction, SurdSum]:
    """Real and imaginary parts of (1-h) sum R mu^2 + (1+h) sum R' eta^2."""
    re = Fraction(0)
    im = SurdSum()
    for scale, weights, units in ((1 - data.h, data.R, data.mu), (1 + data.h, data.Rp, data.eta)):
        for w, u in zip(weights, units):
            sre, sim = u.square_parts()
            re += scale * w * sre
            im = im + SurdSum.of(sim * (scale * w))
    return re, im


def balance_residual(data: ImmersionData) -> complex:
    """The complex number that condition (f) requires to vanish."""
    h = float(data.h)
    total = math.fsum((1 - h) * float(w) * (u * u).real for w, u in zip(data.R, data.mu_complex))
    total += math.fsum((1 + h) * float(w) * (u * u).real for w, u in zip(data.Rp, data.eta_complex))
    imag = math.fsum((1 - h) * float(w) * (u * u).imag for w, u in zip(data.R, data.mu_complex))
    imag += math.fsum((1 + h) * float(w) * (u * u).imag for w, u in zip(data.Rp, data.eta_complex))
    return complex(total, imag)


def _check_balance(data: ImmersionData, tol: float) -> ConditionResult:
    if data.is_exact:
        re, im = _balance_exact(data)
        ok = re == 0 and im.is_zero()
        residual = math.hypot(float(re), float(im))
        return ConditionResult(ok, residual, True, "" if ok else f"re={format_rational(re)} im={im}")
    z = balance_residual(data)
    return ConditionResult(abs(z) < tol, abs(z), False)


def _check_distinct(units: Sequence[UnitComplex]) -> ConditionResult:
    """Units must be pairwise distinct up to sign, i.e. have distinct squares."""
    exact = all(isinstance(u, ExactUnit) for u in units)
    if exact:
        squares = [u.square_parts() for u in units]
        ok = len(set(squares)) == len(squares)
        return ConditionResult(ok, 0.0, True, "" if ok else "two directions agree up to sign")
    squares = [complex(u) ** 2 for u in units]
    gap = min(
        (abs(a - b) for i, a in enumerate(squares) for b in squares[i + 1 :]),
        default=2.0,
    )
    ok = gap > DISTINCT_TOL
    return ConditionResult(ok, gap, False, "" if ok else "two directions agree up to sign")


def _check_unit_norms(units: Sequence[UnitComplex]) -> float:
    return max((abs(abs(complex(u)) - 1.0) for u in units), default=0.0)


def validate(data: ImmersionData, tol: float = 1e-12) -> ConditionReport:
    """Check conditions (a)-(h) of the two-eigenvalue characterization."""
    _check_h(data.h)
    out: dict[str, ConditionResult] = {}
    dim_ok = data.m + data.mp >= 3
    out["dimension"] = ConditionResult(
        dim_ok, 0.0, True, f"n = {data.n}" + ("" if dim_ok else " (need n >= 5)")
    )
    out["a-c"] = ConditionResult(True, 0.0, True, "standard frame E_1..E_%d" % (data.n + 1))
    lam_sum = data.lambda1 + data.lambda2
    if isinstance(lam_sum, Fraction):
        out["d"] = ConditionResult(lam_sum == 4, abs(float(lam_sum - 4)), True, "l1 + l2 = 4")
    else:
        out["d"] = ConditionResult(abs(lam_sum - 4) < tol, abs(lam_sum - 4), False, "l1 + l2 = 4")
    re = _check_weights(data.R, tol)
    rp = _check_weights(data.Rp, tol)
    out["e"] = ConditionResult(
        re.passed and rp.passed,
        max(re.residual, rp.residual),
        re.exact and rp.exact,
        "; ".join(d for d in (re.detail, rp.detail) if d),
    )
    out["f"] = _check_balance(data, tol)
    for key, units in (("g", data.mu), ("h", data.eta)):
        res = _check_distinct(units)
        norm_err = _check_unit_norms(units)
        if norm_err > tol:
            res = ConditionResult(False, norm_err, res.exact, "not of unit norm")
        out[key] = res
    return ConditionReport(out)


# ------------------------------------------------------- S^5 family and angles


def _as_float(x: Weight) -> float:
    return float(x)


def tilde_rho(rho: float, h: Weight) -> float:
    """Angle of the second eta direction given the first, in [-pi/2, 0]."""
    _check_h(h)
    if not -1e-15 <= rho <= math.pi / 2 + 1e-15:
        raise DomainError("rho must lie in [0, pi/2]")
    if rho <= 0:
        return -math.pi / 2
    if rho >= math.pi / 2:
        return 0.0
    # atan2 keeps tiny rho finite: -1/(h tan rho) -> -inf gives -pi/2
    return math.atan2(-math.cos(rho), _as_float(h) * math.sin(rho))


def eta_pair_from_s(s: Weight, h: Weight) -> tuple[float, float, float]:
    """Solve (1-h) + (1+h) s e^{2i rho} + (1+h)(1-s) e^{2i rho~} = 0.

    Returns ``(t, rho, rho~)`` with ``t = tan(rho/2)``.
    """
    _check_h(h)
    lo, hi = h / (1 + h), 1 / (1 + h)
    exact = isinstance(s, Fraction) and isinstance(h, Fraction)
    if exact:
        at_lo, at_hi = s == lo, s == hi
        inside = lo <= s <= hi
    else:
        s, hf = float(s), float(h)
        eps = 1e-14
        at_lo, at_hi = abs(s - lo) <= eps, abs(s - hi) <= eps
        inside = lo - eps <= s <= hi + eps
    if not inside:
        raise DomainError("no unit solutions: s must lie in [h/(1+h), 1/(1+h)]")
    if at_lo:
        t = 0.0
    elif at_hi:
        t = 1.0
    else:
        sf, hf = float(s), float(h)
        t = (math.sqrt(sf * (1 - hf * hf)) - math.sqrt(max(hf * (1 - sf - hf * sf), 0.0))) / math.sqrt(
            sf - hf + hf * sf
        )
    rho = 2 * math.atan(t)
    return t, rho, tilde_rho(rho, h)


def rho_max(h: Weight) -> float:
    hf = _as_float(h)
    return 0.5 * math.acos((hf - 1) / (1 + hf))


def s5_family(h: Weight, rho: float) -> ImmersionData:
    """Member ``rho`` of the one-parameter family of CMC biharmonic planes in S^5."""
    h = _coerce_h(h)
    _check_h(h)
    top = rho_max(h)
    if not 0 <= rho <= top + 1e-12:
        raise DomainError(f"rho must lie in [0, {top!r}]")
    rho = min(float(rho), top)
    mu = (ExactUnit.from_ints(1, 0),)
    if rho == 0:
        R1 = h / (1 + h)
        eta: tuple[UnitComplex, ...] = (ExactUnit.from_ints(1, 0), ExactUnit.from_ints(0, -1))
        if not isinstance(h, Fraction):
            eta = (AngleUnit(0.0), AngleUnit(-math.pi / 2))
        return ImmersionData(h, (Fraction(1),), (R1, 1 - R1), mu, eta, label=f"s5 rho=0")
    hf = float(h)
    c = (1 - hf) / (1 + hf)
    R1 = (1 - c * c) / (2 * (1 + c * math.cos(2 * rho)))
    eta = (AngleUnit(rho), AngleUnit(tilde_rho(rho, h)))
    return ImmersionData(h, (Fraction(1),), (R1, 1 - R1), mu, eta, label=f"s5 rho={rho!r}")


# ---------------------------------------------------------------- symmetries

_TWO_PI = 2 * math.pi
_CANON_DIGITS = 11


def _square_angle(u: UnitComplex) -> float:
    return cmath.phase(complex(u) ** 2) % _TWO_PI


def _reduce(angle: float) -> float:
    a = round(angle % _TWO_PI, _CANON_DIGITS)
    if a >= round(_TWO_PI, _CANON_DIGITS):
        a = 0.0
    return a + 0.0


def _weight_key(w: Weight) -> float:
    return round(float(w), _CANON_DIGITS)


def canonical_key(data: ImmersionData) -> tuple:
    """A key equal for data related by sign flips, conjugation, phase and permutation."""
    return _canonical(data)[0]


def _canonical(data: ImmersionData) -> tuple[tuple, list[tuple[float, Weight]], list[tuple[float, Weight]]]:
    mu_sq = [_square_angle(u) for u in data.mu]
    eta_sq = [_square_angle(u) for u in data.eta]
    best = None
    for flip in (1, -1):
        mu_a = [flip * a for a in mu_sq]
        eta_a = [flip * a for a in eta_sq]
        for anchor in mu_a + eta_a:
            # rounded angles decide the order; exact offsets are what gets emitted
            mus = sorted((_reduce(a - anchor), _weight_key(w), i, (a - anchor) % _TWO_PI) for i, (a, w) in enumerate(zip(mu_a, data.R)))
            etas = sorted((_reduce(a - anchor), _weight_key(w), i, (a - anchor) % _TWO_PI) for i, (a, w) in enumerate(zip(eta_a, data.Rp)))
            key = (tuple(x[:2] for x in mus), tuple(x[:2] for x in etas))
            if best is None or key < best[0]:
                best = (
                    key,
                    [(x[3], data.R[x[2]]) for x in mus],
                    [(x[3], data.Rp[x[2]]) for x in etas],
                )
    assert best is not None
    return best


def canonicalize(data: ImmersionData) -> ImmersionData:
    """Canonical representative modulo the symmetries of solutions.

    Directions are squared (removing signs), rotated by a common phase so
    that one squared direction sits at angle 0, possibly conjugated, and
    sorted; the lexicographically smallest encoding wins.  Output units are
    angle-represented with angles in [0, pi).
    """
    _, mus, etas = _canonical(data)
    return ImmersionData(
        data.h,
        tuple(w for _, w in mus),
        tuple(w for _, w in etas),
        tuple(AngleUnit(a / 2) for a, _ in mus),
        tuple(AngleUnit(a / 2) for a, _ in etas),
        label=data.label,
    )


def equivalent(a: ImmersionData, b: ImmersionData) -> bool:
    return a.h == b.h and canonical_key(a) == canonical_key(b)


# --------------------------------------------------- perturbations (controls)


def perturb_weight(data: ImmersionData, side: str, index: int, delta: float) -> ImmersionData:
    """Add ``delta`` to one weight and renormalize that side to sum 1."""
    weights = [float(w) for w in (data.R if side == "mu" else data.Rp)]
    weights[index] += delta
    total = math.fsum(weights)
    weights = [w / total for w in weights]
    if side == "mu":
        return replace(data, R=tuple(weights))
    return replace(data, Rp=tuple(weights))


def rotate_direction(data: ImmersionData, side: str, index: int, angle: float) -> ImmersionData:
    """Multiply one direction by ``exp(i angle)``."""
    units = list(data.mu if side == "mu" else data.eta)
    units[index] = AngleUnit(cmath.phase(complex(units[index])) + angle)
    if side == "mu":
        return replace(data, mu=tuple(units))
    return replace(data, eta=tuple(units))
