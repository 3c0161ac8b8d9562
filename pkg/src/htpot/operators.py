"""Finite-difference application of the horizontal fields and the sub-Laplacian.

The canonical discretisation follows the expanded operator

    L = Delta_x + |x|^2 / 4 * Delta_t + sum_k <A_k x, grad_x> d/dt_k

with second-order central differences for the pure terms and a 4-point cross
stencil for the mixed x-t derivatives, coefficients frozen at the evaluation
point.  ``apply_sublaplacian_composed`` implements the sum-of-squares form
sum_j X_j^2 through directional second differences along the frozen field
directions; the two agree to the stencil order on smooth inputs and serve as
mutual cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import StructureError
from .groups import GroupSpec, Point

__all__ = [
    "StencilSpec",
    "ScalarField",
    "ResidualReport",
    "suggested_step",
    "apply_vector_field",
    "horizontal_gradient",
    "apply_sublaplacian",
    "apply_sublaplacian_composed",
    "harmonicity_residual",
]


@dataclass(frozen=True)
class StencilSpec:
    """Central-difference step; only second order stencils are provided."""

    h: float = 1e-3
    order: int = 2

    def __post_init__(self) -> None:
        if self.h <= 0:
            raise StructureError(f"stencil step must be positive, got {self.h}")
        if self.order != 2:
            raise StructureError("only order-2 central stencils are supported")

    def halved(self) -> "StencilSpec":
        return StencilSpec(h=self.h / 2, order=self.order)


@dataclass
class ScalarField:
    """A scalar function of group points.

    ``eval`` maps a Point to a float.  ``eval_many``, when provided, maps raw
    coordinate arrays (P, m), (P, n) to values (P,) and is used to batch
    stencil and quadrature evaluations.  The callable must be safe to call
    concurrently; the package itself never mutates shared state through it.
    """

    eval: Callable[[Point], float]
    label: str = ""
    eval_many: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def values(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        if self.eval_many is not None:
            return np.asarray(self.eval_many(x, t), dtype=float)
        return np.array([self.eval(Point(xi, ti)) for xi, ti in zip(x, t)])


@dataclass
class ResidualReport:
    points: list[Point]
    residuals: np.ndarray
    max_abs: float
    convergence_order: float | None = None

    def to_dict(self) -> dict:
        return {
            "residuals": [float(r) for r in self.residuals],
            "max_abs": self.max_abs,
            "convergence_order": self.convergence_order,
        }


def suggested_step(distance_to_pole: float | None = None, base: float = 1e-3) -> StencilSpec:
    """Default step, shrunk to 1% of the gauge distance to the nearest pole."""
    h = base if distance_to_pole is None else min(base, 0.01 * distance_to_pole)
    return StencilSpec(h=h)


def _field_coeffs(spec: GroupSpec, x: np.ndarray) -> np.ndarray:
    """Coefficients 0.5 (A_k x)_j of d/dt_k in X_j, shape (n, m)."""
    if spec.n == 0:
        return np.zeros((0, spec.m))
    return 0.5 * np.einsum("kji,i->kj", spec.matrices, x)


def apply_vector_field(
    spec: GroupSpec, j: int, u: ScalarField, p: Point, stencil: StencilSpec = StencilSpec()
) -> float:
    """Central-difference X_j u at p (j is 1-based)."""
    if not 1 <= j <= spec.m:
        raise StructureError(f"field index must be in [1, {spec.m}], got {j}")
    h = stencil.h
    m, n = spec.m, spec.n
    pts_x = np.tile(p.x, (2 + 2 * n, 1))
    pts_t = np.tile(p.t, (2 + 2 * n, 1)) if n else np.zeros((2 + 2 * n, 0))
    pts_x[0, j - 1] += h
    pts_x[1, j - 1] -= h
    for k in range(n):
        pts_t[2 + 2 * k, k] += h
        pts_t[3 + 2 * k, k] -= h
    vals = u.values(pts_x, pts_t)
    coeffs = _field_coeffs(spec, p.x)[:, j - 1] if n else np.zeros(0)
    terms = [(vals[0] - vals[1]) / (2 * h)]
    for k in range(n):
        terms.append(coeffs[k] * (vals[2 + 2 * k] - vals[3 + 2 * k]) / (2 * h))
    return math.fsum(terms)


def horizontal_gradient(
    spec: GroupSpec, u: ScalarField, p: Point, stencil: StencilSpec = StencilSpec()
) -> np.ndarray:
    return np.array([apply_vector_field(spec, j, u, p, stencil) for j in range(1, spec.m + 1)])


def apply_sublaplacian(
    spec: GroupSpec, u: ScalarField, p: Point, stencil: StencilSpec = StencilSpec()
) -> float:
    """Expanded-form L u at p with central second differences."""
    h = stencil.h
    m, n = spec.m, spec.n
    rows = 1 + 2 * m + 2 * n + 4 * m * n
    pts_x = np.tile(p.x, (rows, 1))
    pts_t = np.tile(p.t, (rows, 1)) if n else np.zeros((rows, 0))
    r = 1
    for i in range(m):
        pts_x[r, i] += h
        pts_x[r + 1, i] -= h
        r += 2
    for k in range(n):
        pts_t[r, k] += h
        pts_t[r + 1, k] -= h
        r += 2
    cross_start = r
    for i in range(m):
        for k in range(n):
            for sx, st in ((h, h), (h, -h), (-h, h), (-h, -h)):
                pts_x[r, i] += sx
                pts_t[r, k] += st
                r += 1
    vals = u.values(pts_x, pts_t)
    u0 = vals[0]
    h2 = h * h
    terms = []
    for i in range(m):
        terms.append((vals[1 + 2 * i] + vals[2 + 2 * i] - 2 * u0) / h2)
    s2 = float(np.dot(p.x, p.x))
    base_t = 1 + 2 * m
    for k in range(n):
        terms.append(0.25 * s2 * (vals[base_t + 2 * k] + vals[base_t + 2 * k + 1] - 2 * u0) / h2)
    if n:
        ax = np.einsum("kji,i->kj", spec.matrices, p.x)  # (n, m), rows A_k x
        r = cross_start
        for i in range(m):
            for k in range(n):
                mixed = (vals[r] - vals[r + 1] - vals[r + 2] + vals[r + 3]) / (4 * h2)
                terms.append(ax[k, i] * mixed)
                r += 4
    return math.fsum(terms)


def apply_sublaplacian_composed(
    spec: GroupSpec, u: ScalarField, p: Point, stencil: StencilSpec = StencilSpec()
) -> float:
    """Sum-of-squares form: directional second differences along each X_j.

    The first-order coefficients of X_j depend only on x and are constant
    along the x_j direction, so the straight-line second difference with
    frozen direction is consistent with X_j^2.
    """
    h = stencil.h
    m, n = spec.m, spec.n
    coeffs = _field_coeffs(spec, p.x)  # (n, m)
    rows = 2 * m
    pts_x = np.tile(p.x, (rows, 1))
    pts_t = np.tile(p.t, (rows, 1)) if n else np.zeros((rows, 0))
    for j in range(m):
        pts_x[2 * j, j] += h
        pts_x[2 * j + 1, j] -= h
        if n:
            pts_t[2 * j] += h * coeffs[:, j]
            pts_t[2 * j + 1] -= h * coeffs[:, j]
    vals = u.values(pts_x, pts_t)
    u0 = u.values(p.x[None, :], p.t[None, :])[0]
    h2 = h * h
    return math.fsum((vals[2 * j] + vals[2 * j + 1] - 2 * u0) / h2 for j in range(m))


def harmonicity_residual(
    spec: GroupSpec,
    u: ScalarField,
    samples: Sequence[Point],
    stencil: StencilSpec = StencilSpec(),
    estimate_order: bool = True,
) -> ResidualReport:
    """Stencil residuals L u at the samples, with an h vs h/2 order estimate."""
    res = np.array([apply_sublaplacian(spec, u, p, stencil) for p in samples])
    max_abs = float(np.max(np.abs(res))) if len(res) else 0.0
    order = None
    if estimate_order and len(res):
        res_half = np.array([apply_sublaplacian(spec, u, p, stencil.halved()) for p in samples])
        max_half = float(np.max(np.abs(res_half)))
        if max_half > 0 and max_abs > 0:
            order = math.log2(max_abs / max_half)
    return ResidualReport(list(samples), res, max_abs, order)
