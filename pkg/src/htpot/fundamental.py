"""Homogeneous gauge, fundamental solution of the sub-Laplacian, and flux calibration.

The gauge is N(x, t) = (|x|^4 + 16 |t|^2)^(1/4); the fundamental solution is

    Gamma(p) = c * N(p)^(2 - Q),   Q = m + 2n,

which satisfies L Gamma_pole = -delta_pole with Gamma_pole(p) = Gamma(pole^-1 o p).
The normalisation constant c is not pinned by any closed form here; it is fixed
numerically by requiring the outward flux of the horizontal gradient of Gamma
through a coordinate box around the origin to equal -1 (``calibrate_c``).  In
abelian mode (n = 0, Q = m) everything reduces to the Newtonian kernel
c |x|^(2-m), whose calibrated constant for m = 3 is 1/(4 pi).

Horizontal derivatives of Gamma are available in closed form:

    X_j N^4 = 4 |x|^2 x_j + 16 sum_k t_k (A_k x)_j
    X_j Gamma = c (2-Q)/4 * (N^4)^((2-Q)/4 - 1) * X_j N^4

and, by left invariance, (X_j Gamma_pole)(p) = (X_j Gamma)(pole^-1 o p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import boundary
from .errors import CalibrationError, PoleError
from .geometry import Box, box_faces, tensor_grid_chunks
from .groups import GroupSpec, Point, compose, homogeneous_dimension, inverse

__all__ = [
    "POLE_GAUGE_CUTOFF",
    "FundamentalSolutionParams",
    "GaugeValue",
    "params_for",
    "gauge",
    "gauge_fourth",
    "gamma",
    "gamma_pole",
    "quasi_distance",
    "horizontal_gradient_gamma",
    "gamma_partials",
    "flux",
    "calibrate_c",
]

# Evaluations closer to a pole than this gauge distance are rejected.
POLE_GAUGE_CUTOFF = 1e-9


@dataclass(frozen=True)
class FundamentalSolutionParams:
    """Normalisation constant and cached homogeneous dimension."""

    c: float
    Q: int

    def __post_init__(self) -> None:
        if self.c <= 0:
            raise ValueError(f"constant c must be positive, got {self.c}")
        if self.Q < 3:
            raise ValueError(f"homogeneous dimension must be >= 3, got {self.Q}")

    @property
    def exponent(self) -> float:
        return (2.0 - self.Q) / 4.0


def params_for(spec: GroupSpec, c: float = 1.0) -> FundamentalSolutionParams:
    return FundamentalSolutionParams(c=c, Q=homogeneous_dimension(spec))


@dataclass(frozen=True)
class GaugeValue:
    value: float
    fourth_power: float


def gauge_fourth(spec: GroupSpec, x: np.ndarray, t: np.ndarray) -> np.ndarray:
    """|x|^4 + 16 |t|^2 on raw arrays (batched over leading axes)."""
    s2 = np.sum(np.square(x), axis=-1)
    out = np.square(s2)
    if spec.n:
        out = out + 16.0 * np.sum(np.square(t), axis=-1)
    return out


def gauge(spec: GroupSpec, p: Point) -> GaugeValue:
    n4 = float(gauge_fourth(spec, p.x, p.t))
    return GaugeValue(value=n4 ** 0.25, fourth_power=n4)


def _check_off_pole(n4: np.ndarray) -> None:
    if np.min(n4) < POLE_GAUGE_CUTOFF**4:
        raise PoleError(
            f"evaluation within gauge distance {POLE_GAUGE_CUTOFF:g} of a pole (min N^4 = {float(np.min(n4)):g})"
        )


def _pow_quarter(n4: np.ndarray, p: float) -> np.ndarray:
    """n4**p, specialised for the negative quarter-integer exponents of integer Q."""
    k4 = -4.0 * p
    k = int(round(k4))
    if abs(k4 - k) > 1e-12 or k <= 0:
        return np.power(n4, p)
    whole, rem = divmod(k, 4)
    out = None
    if rem:
        s = np.sqrt(n4)
        out = s if rem == 2 else (np.sqrt(s) if rem == 1 else s * np.sqrt(s))
    for _ in range(whole):
        out = n4 if out is None else out * n4
    return 1.0 / out


def gamma_from_fourth(params: FundamentalSolutionParams, n4: np.ndarray) -> np.ndarray:
    _check_off_pole(np.asarray(n4))
    return params.c * _pow_quarter(n4, params.exponent)


def gamma(params: FundamentalSolutionParams, spec: GroupSpec, p: Point) -> float:
    return float(gamma_from_fourth(params, gauge_fourth(spec, p.x, p.t)))


def pole_shift(
    spec: GroupSpec, x: np.ndarray, t: np.ndarray, pole_x: np.ndarray, pole_t: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates of pole^-1 o p, batched over the p arrays."""
    dx = x - pole_x
    if spec.n == 0:
        return dx, t
    v = np.einsum("kji,i->kj", spec.matrices, -pole_x)  # rows A_k(-pole_x)
    bil = 0.5 * np.einsum("...j,kj->...k", x, v)
    return dx, t - pole_t + bil


def gamma_pole(params: FundamentalSolutionParams, spec: GroupSpec, p: Point, pole: Point) -> float:
    """Gamma(pole^-1 o p); raises PoleError when p is (numerically) at the pole."""
    shifted = compose(spec, inverse(spec, pole), p)
    return float(gamma_from_fourth(params, gauge_fourth(spec, shifted.x, shifted.t)))


def quasi_distance(params: FundamentalSolutionParams, spec: GroupSpec, p: Point, q: Point) -> float:
    """d(p, q) = Gamma(q^-1 o p)^(1/(2-Q)); includes the factor c^(1/(2-Q))."""
    shifted = compose(spec, inverse(spec, q), p)
    n4 = float(gauge_fourth(spec, shifted.x, shifted.t))
    if n4 == 0.0:
        return 0.0
    return (params.c * n4**params.exponent) ** (1.0 / (2.0 - params.Q))


def gamma_partials(
    params: FundamentalSolutionParams, spec: GroupSpec, x: np.ndarray, t: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Euclidean partials (d/dx Gamma, d/dt Gamma) at raw coordinates.

    Shapes: x (..., m), t (..., n) -> ((..., m), (..., n)).
    """
    n4 = gauge_fourth(spec, x, t)
    _check_off_pole(n4)
    radial = params.c * params.exponent * _pow_quarter(n4, params.exponent - 1.0)
    s2 = np.sum(np.square(x), axis=-1)
    gx = radial[..., None] * 4.0 * s2[..., None] * x
    gt = radial[..., None] * 32.0 * t if spec.n else np.zeros_like(t)
    return gx, gt


def gradient_gamma_xt(
    params: FundamentalSolutionParams, spec: GroupSpec, x: np.ndarray, t: np.ndarray
) -> np.ndarray:
    """(X_1 Gamma, ..., X_m Gamma) at raw coordinates, shape (..., m)."""
    gx, gt = gamma_partials(params, spec, x, t)
    if spec.n == 0:
        return gx
    # X_j = d/dx_j + 0.5 sum_k (A_k x)_j d/dt_k
    ax = np.einsum("kji,...i->...kj", spec.matrices, x)
    return gx + 0.5 * np.einsum("...kj,...k->...j", ax, gt)


def horizontal_gradient_gamma(
    params: FundamentalSolutionParams, spec: GroupSpec, p: Point, pole: Point
) -> np.ndarray:
    """Closed-form (X_j Gamma_pole)(p) for j = 1..m, differentiating in p."""
    shifted = compose(spec, inverse(spec, pole), p)
    return gradient_gamma_xt(params, spec, shifted.x, shifted.t)


def _face_flux(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    face,
    nodes_per_axis: int,
    chunk: int,
) -> float:
    """Outward flux of the horizontal gradient of Gamma through one box face."""
    m = spec.m
    fixed_pos = face.index if face.coord == "x" else m + face.index
    partial_sums: list[float] = []
    for free_pts, w in tensor_grid_chunks(face.free_bounds, nodes_per_axis, "gauss", chunk):
        pts = np.insert(free_pts, fixed_pos, face.value, axis=1)
        x, t = pts[:, :m], pts[:, m:]
        grad = gradient_gamma_xt(params, spec, x, t)
        integrand = boundary.face_integrand(spec, grad, x, face)
        partial_sums.append(float(np.sum(integrand * w)))
    return math.fsum(partial_sums)


def flux(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    box: Box,
    nodes_per_axis: int = 12,
    chunk: int = 200_000,
) -> float:
    """Total outward flux of the horizontal gradient of Gamma through a box.

    The box must contain the origin strictly; the exact value is -c / c*
    where c* is the calibrated constant.  Faces are integrated with a
    tensor-product Gauss rule and summed in a fixed face-major order.
    """
    if not box.contains(Point(np.zeros(spec.m), np.zeros(spec.n)), strict=True):
        raise CalibrationError("flux box must contain the origin strictly")
    return math.fsum(
        _face_flux(params, spec, face, nodes_per_axis, chunk) for face in box_faces(box)
    )


def calibrate_c(
    spec: GroupSpec,
    box: Box,
    nodes_per_axis: int = 12,
    chunk: int = 200_000,
) -> float:
    """Constant c for which the outward gauge flux through ``box`` equals -1."""
    raw = flux(params_for(spec, c=1.0), spec, box, nodes_per_axis, chunk)
    if not np.isfinite(raw) or abs(raw) < 1e-300:
        raise CalibrationError(f"degenerate flux {raw!r}; refine the grid or box")
    return -1.0 / raw
