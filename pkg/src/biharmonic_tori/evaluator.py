"""Closed-form evaluation of the immersion and independent geometric checks.

Every trigonometric block ``A (cos t, sin t)`` with ``t = kx*x + ky*y`` is
differentiated in closed form: each derivative multiplies by ``kx`` or
``ky`` and advances the phase by a quarter period.  The bitension residual
deliberately does *not* use that structure; it differentiates the mean
curvature field with nested central differences and the connection of the
unit sphere, evaluated in extended precision so that truncation (not
rounding) dominates at the default step.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .errors import DomainError
from .exactnum import SurdValue
from .spectral import AngleUnit, ExactUnit, ImmersionData, UnitComplex

MAX_ORDER = 6
FD_STEP_RANGE = (1e-6, 1e-2)


class Metric2(NamedTuple):
    g11: np.ndarray
    g12: np.ndarray
    g22: np.ndarray


class _Blocks(NamedTuple):
    amp: np.ndarray  # sqrt(R/2), one per 2-plane
    kx: np.ndarray
    ky: np.ndarray
    lam: np.ndarray
    first: np.ndarray  # True on the lambda_1 planes


def _to_dtype(value, dtype):
    if isinstance(value, Fraction):
        return dtype(value.numerator) / dtype(value.denominator)
    if isinstance(value, SurdValue):
        return _to_dtype(value.coeff, dtype) * np.sqrt(dtype(value.radicand))
    return dtype(value)


def _unit_parts(u: UnitComplex, dtype) -> tuple:
    if isinstance(u, ExactUnit):
        root = np.sqrt(_to_dtype(u.norm2, dtype))
        return _to_dtype(u.L, dtype) / root, _to_dtype(u.M, dtype) / root
    angle = dtype(u.angle)
    return np.cos(angle), np.sin(angle)


@lru_cache(maxsize=256)
def _blocks(data: ImmersionData, dtype=np.float64) -> _Blocks:
    h = _to_dtype(data.h, dtype)
    root1 = np.sqrt(dtype(2) * (dtype(1) - h))
    root2 = np.sqrt(dtype(2) * (dtype(1) + h))
    amp, kx, ky, lam, first = [], [], [], [], []
    for weights, units, root, is_first in ((data.R, data.mu, root1, True), (data.Rp, data.eta, root2, False)):
        for w, u in zip(weights, units):
            a, b = _unit_parts(u, dtype)
            amp.append(np.sqrt(_to_dtype(w, dtype) / dtype(2)))
            # Im(mu z) = b x + a y for mu = a + ib
            kx.append(root * b)
            ky.append(root * a)
            lam.append(root * root)
            first.append(is_first)
    return _Blocks(
        np.array(amp, dtype=dtype),
        np.array(kx, dtype=dtype),
        np.array(ky, dtype=dtype),
        np.array(lam, dtype=dtype),
        np.array(first, dtype=bool),
    )


def _interleave(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    out = np.empty(c.shape[:-1] + (2 * c.shape[-1],), dtype=c.dtype)
    out[..., 0::2] = c
    out[..., 1::2] = s
    return out


def derivative(data: ImmersionData, ox: int, oy: int, x, y, dtype=np.float64) -> np.ndarray:
    """Partial derivative d^ox/dx d^oy/dy of psi, shape ``broadcast(x, y) + (n+1,)``."""
    if ox < 0 or oy < 0:
        raise DomainError("derivative orders must be nonnegative")
    if ox + oy > MAX_ORDER:
        raise DomainError(f"derivative order {ox + oy} unsupported (max {MAX_ORDER})")
    b = _blocks(data, dtype)
    x = np.asarray(x, dtype=dtype)[..., None]
    y = np.asarray(y, dtype=dtype)[..., None]
    phase = b.kx * x + b.ky * y
    scale = b.amp * b.kx**ox * b.ky**oy
    cos, sin = np.cos(phase), np.sin(phase)
    # d/dt (cos, sin) = (-sin, cos): a quarter-turn per order
    quarter = (ox + oy) % 4
    c, s = [(cos, sin), (-sin, cos), (-cos, -sin), (sin, -cos)][quarter]
    return _interleave(scale * c, scale * s)


def evaluate(data: ImmersionData, x, y, dtype=np.float64) -> np.ndarray:
    """The immersion ``psi(x, y)`` in R^(n+1)."""
    return derivative(data, 0, 0, x, y, dtype)


def eigen_parts(data: ImmersionData, x, y, dtype=np.float64) -> tuple[np.ndarray, np.ndarray]:
    """``(psi_1, psi_2)``: the lambda_1 and lambda_2 components of psi."""
    psi = evaluate(data, x, y, dtype)
    mask = np.repeat(_blocks(data, dtype).first, 2)
    return np.where(mask, psi, 0), np.where(mask, 0, psi)


def _lap(data: ImmersionData, x, y, dtype=np.float64) -> np.ndarray:
    return derivative(data, 2, 0, x, y, dtype) + derivative(data, 0, 2, x, y, dtype)


def eigen_residual(data: ImmersionData, x, y) -> np.ndarray:
    """``|psi_xx + psi_yy + l1 psi_1 + l2 psi_2|`` pointwise."""
    psi = evaluate(data, x, y)
    lam = np.repeat(_blocks(data).lam, 2)
    return np.linalg.norm(_lap(data, x, y) + lam * psi, axis=-1)


def induced_metric(data: ImmersionData, x, y) -> Metric2:
    px = derivative(data, 1, 0, x, y)
    py = derivative(data, 0, 1, x, y)
    return Metric2(
        np.einsum("...i,...i", px, px),
        np.einsum("...i,...i", px, py),
        np.einsum("...i,...i", py, py),
    )


def _mean_curvature_vector(data: ImmersionData, x, y, dtype=np.float64) -> np.ndarray:
    # sphere mean curvature: half the ambient Laplacian plus the position
    return 0.5 * _lap(data, x, y, dtype) + evaluate(data, x, y, dtype)


def mean_curvature(data: ImmersionData, x, y) -> tuple[np.ndarray, np.ndarray]:
    """Mean curvature vector in S^n (ambient coordinates) and its length."""
    H = _mean_curvature_vector(data, x, y)
    return H, np.linalg.norm(H, axis=-1)


def tension(data: ImmersionData, x, y, dtype=np.float64) -> np.ndarray:
    """Tension field of psi for its induced metric; equals 2H when isometric."""
    return _tension_g(data, _inverse_metric(data, dtype), x, y, dtype)


def _dot(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.sum(a * b, axis=-1, keepdims=True)


def _inverse_metric(data: ImmersionData, dtype) -> np.ndarray:
    # the induced metric of this ansatz is constant on the plane
    b = _blocks(data, dtype)
    w = b.amp**2
    g11 = np.sum(w * b.kx * b.kx)
    g12 = np.sum(w * b.kx * b.ky)
    g22 = np.sum(w * b.ky * b.ky)
    det = g11 * g22 - g12 * g12
    if det <= 0:
        raise DomainError("induced metric is degenerate")
    return np.array([[g22, -g12], [-g12, g11]], dtype=dtype) / det


def _tension_g(data: ImmersionData, ginv: np.ndarray, x, y, dtype) -> np.ndarray:
    out = 2 * evaluate(data, x, y, dtype)
    for (i, j), orders in (((0, 0), (2, 0)), ((0, 1), (1, 1)), ((1, 1), (0, 2))):
        coeff = ginv[i, j] * (1 if i == j else 2)
        if coeff != 0:
            out = out + coeff * derivative(data, *orders, x, y, dtype)
    return out


def bitension_residual(data: ImmersionData, x, y, fd_step: float = 1e-4, dtype=np.longdouble) -> np.ndarray:
    """Norm of the bitension field, computed by finite differences.

    ``nabla_X V = D_X V + <V, dpsi(X)> psi`` is the Levi-Civita connection of
    the unit sphere along psi.  With the induced metric ``g`` (constant for
    this ansatz, so no Christoffel terms) the bitension field is

        g^ij nabla_i nabla_j tau - g^ij <tau, psi_j> psi_i + 2 tau,

    the last two terms being minus the curvature trace of the unit sphere.
    Each covariant derivative is a central difference of step ``fd_step``
    applied to the closed-form tension field.  On an isometric immersion
    ``g`` is the identity, ``tau = 2H`` and the middle term drops out.
    """
    lo, hi = FD_STEP_RANGE
    if not lo <= fd_step <= hi:
        raise DomainError(f"fd_step must lie in [{lo:g}, {hi:g}]")
    s = dtype(fd_step)
    x = np.asarray(x, dtype=dtype)
    y = np.asarray(y, dtype=dtype)
    ginv = _inverse_metric(data, dtype)
    unit = ((s, dtype(0)), (dtype(0), s))

    def tau(px, py):
        return _tension_g(data, ginv, px, py, dtype)

    def first(j, px, py):
        # nabla_j tau
        dx, dy = unit[j]
        d_tau = (tau(px + dx, py + dy) - tau(px - dx, py - dy)) / (2 * s)
        dpsi = derivative(data, 1 - j, j, px, py, dtype)
        return d_tau + _dot(tau(px, py), dpsi) * evaluate(data, px, py, dtype)

    psi = evaluate(data, x, y, dtype)
    t0 = tau(x, y)
    dpsi = [derivative(data, 1 - i, i, x, y, dtype) for i in (0, 1)]
    total = 2 * t0
    for j in (0, 1):
        w = first(j, x, y)
        for i in (0, 1):
            if ginv[i, j] == 0:
                continue
            dx, dy = unit[i]
            second = (first(j, x + dx, y + dy) - first(j, x - dx, y - dy)) / (2 * s) + _dot(w, dpsi[i]) * psi
            total = total + ginv[i, j] * (second - _dot(t0, dpsi[j]) * dpsi[i])
    return np.linalg.norm(total, axis=-1).astype(np.float64)


# ----------------------------------------------------------------- verify


@dataclass(frozen=True)
class Tolerances:
    closed_form: float = 1e-12
    eigen: float = 1e-13
    bitension: float = 1e-5

    def __post_init__(self) -> None:
        if min(self.closed_form, self.eigen, self.bitension) <= 0:
            raise DomainError("tolerances must be positive")


@dataclass
class VerificationReport:
    residuals: dict[str, float]
    tolerances: dict[str, float]
    grid_n: int
    fd_step: float
    extras: dict[str, float] = field(default_factory=dict)

    @property
    def checks(self) -> dict[str, bool]:
        return {k: self.residuals[k] < self.tolerances[k] for k in self.residuals}

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, ok in self.checks.items() if not ok]

    def to_json(self) -> dict:
        return {
            "passed": self.passed,
            "grid_n": self.grid_n,
            "fd_step": self.fd_step,
            "residuals": self.residuals,
            "tolerances": self.tolerances,
            "checks": self.checks,
            **({"extras": self.extras} if self.extras else {}),
        }

    def __str__(self) -> str:
        lines = [f"grid {self.grid_n}x{self.grid_n} on [0,2pi]^2, fd_step={self.fd_step:g}"]
        for key, value in self.residuals.items():
            status = "pass" if self.checks[key] else "FAIL"
            lines.append(f"  {key:<10} {status}  sup={value:.3e}  tol={self.tolerances[key]:.0e}")
        for key, value in self.extras.items():
            lines.append(f"  {key:<10} {value:.4g}")
        lines.append("overall: " + ("pass" if self.passed else "FAIL"))
        return "\n".join(lines)


def grid(grid_n: int) -> tuple[np.ndarray, np.ndarray]:
    if grid_n < 2:
        raise DomainError("grid_n must be at least 2")
    axis = np.linspace(0.0, 2 * math.pi, grid_n)
    return np.meshgrid(axis, axis, indexing="ij")


def verify(
    data: ImmersionData,
    grid_n: int = 8,
    fd_step: float = 1e-4,
    tolerances: Tolerances = Tolerances(),
    richardson: bool = False,
) -> VerificationReport:
    """Sup-norm residuals of all geometric identities over a grid.

    With ``richardson=True`` the bitension residual is also computed at half
    the step and the ratio of the two sup-norms is reported in ``extras``.
    """
    X, Y = grid(grid_n)
    h = float(data.h)
    norm_res = np.max(np.abs(np.linalg.norm(evaluate(data, X, Y), axis=-1) - 1))
    g = induced_metric(data, X, Y)
    iso_res = max(np.max(np.abs(g.g11 - 1)), np.max(np.abs(g.g12)), np.max(np.abs(g.g22 - 1)))
    _, H = mean_curvature(data, X, Y)
    cmc_res = np.max(np.abs(H - h))
    eig_res = np.max(eigen_residual(data, X, Y))
    bt = np.max(bitension_residual(data, X, Y, fd_step))
    report = VerificationReport(
        residuals={
            "norm": float(norm_res),
            "isometry": float(iso_res),
            "cmc": float(cmc_res),
            "eigen": float(eig_res),
            "bitension": float(bt),
        },
        tolerances={
            "norm": tolerances.closed_form,
            "isometry": tolerances.closed_form,
            "cmc": tolerances.closed_form,
            "eigen": tolerances.eigen,
            "bitension": tolerances.bitension,
        },
        grid_n=grid_n,
        fd_step=fd_step,
    )
    if richardson:
        half = np.max(bitension_residual(data, X, Y, fd_step / 2))
        report.extras["bitension_half_step"] = float(half)
        report.extras["richardson_ratio"] = float(bt / half) if half > 0 else math.inf
    return report


# ----------------------------------------------------------------- export


def sample(data: ImmersionData, nx: int, ny: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Row-major samples of psi over an ``nx x ny`` grid on [0, 2pi]^2."""
    if nx < 1 or ny < 1:
        raise DomainError("sample sizes must be positive")
    xs = np.linspace(0.0, 2 * math.pi, nx)
    ys = np.linspace(0.0, 2 * math.pi, ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    X, Y = X.ravel(), Y.ravel()
    return X, Y, evaluate(data, X, Y)


def write_sample_csv(data: ImmersionData, nx: int, ny: int, stream) -> None:
    X, Y, P = sample(data, nx, ny)
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["x", "y"] + [f"c{i}" for i in range(P.shape[-1])])
    for x, y, row in zip(X, Y, P):
        writer.writerow([repr(float(x)), repr(float(y))] + [repr(float(v)) for v in row])
