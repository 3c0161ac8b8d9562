"""Prototype Heisenberg-type groups on R^(m+n).

A group is described by a horizontal dimension ``m``, a vertical dimension
``n`` and ``n`` skew-symmetric orthogonal m-by-m matrices that pairwise
anticommute.  Points are pairs (x, t) with x in R^m and t in R^n, composed by

    (x, t) o (y, s) = (x + y, t_k + s_k + <A_k x, y> / 2)

with dilations d_lam(x, t) = (lam x, lam^2 t) and inverse (-x, -t).

Orientation convention
----------------------
The bilinear term is ``0.5 * (A_k x) . y`` with ``x`` taken from the *left*
factor and the ordinary matrix-vector product ``(A_k x)_j = sum_i A_k[j, i] x[i]``.
On the d=1 Heisenberg group (A = [[0, 1], [-1, 0]]) this makes

    ((1, 0), 0) o ((0, 1), 0) = ((1, 1), -1/2).

This sign is frozen by the hand-checked value above; every derived formula in
the package (vector fields, gradients, image sums) inherits it.

The degenerate case n = 0 ("abelian mode", plain R^m with vector addition) is
supported for m >= 3 so that every numerical claim in the package can be
cross-checked against classical Newtonian potential theory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import StructureError

__all__ = [
    "GroupSpec",
    "Point",
    "ValidationReport",
    "validate_group",
    "make_heisenberg",
    "make_quaternionic",
    "make_abelian",
    "compose",
    "inverse",
    "dilate",
    "homogeneous_dimension",
    "origin",
    "group_from_config",
    "group_to_config",
    "load_group",
]

DEFAULT_MATRIX_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GroupSpec:
    """Defining data of a prototype H-type group.

    ``matrices`` holds the n skew-symmetric orthogonal anticommuting
    m-by-m matrices as a single (n, m, m) array (empty for n = 0).
    """

    m: int
    n: int
    matrices: np.ndarray
    tolerance: float = DEFAULT_MATRIX_TOLERANCE
    name: str = ""

    def __post_init__(self) -> None:
        if self.m < 1:
            raise StructureError(f"horizontal dimension must be positive, got m={self.m}")
        if self.n < 0:
            raise StructureError(f"vertical dimension must be non-negative, got n={self.n}")
        mats = np.asarray(self.matrices, dtype=float)
        if self.n == 0:
            mats = mats.reshape((0, self.m, self.m))
        if mats.shape != (self.n, self.m, self.m):
            raise StructureError(
                f"expected {self.n} matrices of shape ({self.m}, {self.m}), got array of shape {mats.shape}"
            )
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @property
    def dim(self) -> int:
        return self.m + self.n

    @property
    def is_abelian(self) -> bool:
        return self.n == 0


@dataclass(frozen=True)
class Point:
    """A group element (x, t), stored as two 1-d float arrays."""

    x: np.ndarray
    t: np.ndarray

    def __post_init__(self) -> None:
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        t = np.atleast_1d(np.asarray(self.t, dtype=float)) if np.size(self.t) else np.zeros(0)
        x.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "t", t)

    @staticmethod
    def of(x: Sequence[float], t: Sequence[float] = ()) -> "Point":
        return Point(np.asarray(x, dtype=float), np.asarray(t, dtype=float))

    def conforms(self, spec: GroupSpec) -> bool:
        return self.x.shape == (spec.m,) and self.t.shape == (spec.n,)


def _require_conforming(spec: GroupSpec, *points: Point) -> None:
    for p in points:
        if not p.conforms(spec):
            raise StructureError(
                f"point with shapes x{p.x.shape}, t{p.t.shape} does not conform to m={spec.m}, n={spec.n}"
            )


@dataclass(frozen=True)
class ValidationReport:
    """Per-matrix deviations from the defining constraints."""

    skew_defects: tuple[tuple[int, float], ...]
    orthogonality_defects: tuple[tuple[int, float], ...]
    anticommutation_defects: tuple[tuple[tuple[int, int], float], ...]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "skew_defects": [[k, d] for k, d in self.skew_defects],
            "orthogonality_defects": [[k, d] for k, d in self.orthogonality_defects],
            "anticommutation_defects": [[list(kl), d] for kl, d in self.anticommutation_defects],
            "passed": self.passed,
        }


def validate_group(spec: GroupSpec) -> ValidationReport:
    """Check skew-symmetry, orthogonality and pairwise anticommutation.

    Structural problems (wrong shapes or counts) raise ``StructureError`` when
    the spec is constructed; this function only measures deviations of
    well-shaped matrices and never raises.
    """
    mats = spec.matrices
    eye = np.eye(spec.m)
    skew = []
    orth = []
    anti = []
    for k in range(spec.n):
        a = mats[k]
        skew.append((k + 1, float(np.max(np.abs(a + a.T))) if spec.m else 0.0))
        orth.append((k + 1, float(np.max(np.abs(a.T @ a - eye)))))
    for k in range(spec.n):
        for l in range(k + 1, spec.n):
            dev = float(np.max(np.abs(mats[k] @ mats[l] + mats[l] @ mats[k])))
            anti.append(((k + 1, l + 1), dev))
    worst = max(
        [d for _, d in skew] + [d for _, d in orth] + [d for _, d in anti],
        default=0.0,
    )
    return ValidationReport(tuple(skew), tuple(orth), tuple(anti), worst <= spec.tolerance)


def make_heisenberg(d: int) -> GroupSpec:
    """Heisenberg group H^d: m = 2d, n = 1, block-diagonal rotation matrix."""
    if d < 1:
        raise StructureError(f"Heisenberg parameter d must be >= 1, got {d}")
    block = np.array([[0.0, 1.0], [-1.0, 0.0]])
    a = np.zeros((2 * d, 2 * d))
    for i in range(d):
        a[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] = block
    return GroupSpec(m=2 * d, n=1, matrices=a[np.newaxis], name=f"heisenberg_{d}")


def make_quaternionic() -> GroupSpec:
    """m = 4, n = 3 group built from left multiplication by i, j, k on R^4."""
    a1 = np.array(
        [
            [0.0, -1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, 1.0, 0.0],
        ]
    )
    a2 = np.array(
        [
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, -1.0, 0.0, 0.0],
        ]
    )
    a3 = np.array(
        [
            [0.0, 0.0, 0.0, -1.0],
            [0.0, 0.0, -1.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        ]
    )
    return GroupSpec(m=4, n=3, matrices=np.stack([a1, a2, a3]), name="quaternionic")


def make_abelian(m: int) -> GroupSpec:
    """Abelian oracle group (R^m, +) with m >= 3, so the Newtonian kernel applies."""
    if m <= 2:
        raise StructureError(f"abelian mode needs m >= 3 (got m={m}); m <= 2 has no power-law kernel")
    return GroupSpec(m=m, n=0, matrices=np.zeros((0, m, m)), name=f"abelian_{m}")


def bilinear_t(spec: GroupSpec, x_left: np.ndarray, x_right: np.ndarray) -> np.ndarray:
    """The t-shift 0.5 * <A_k x_left, x_right>, batched over leading axes."""
    if spec.n == 0:
        shape = np.broadcast_shapes(x_left.shape[:-1], x_right.shape[:-1])
        return np.zeros(shape + (0,))
    return 0.5 * np.einsum("kji,...i,...j->...k", spec.matrices, x_left, x_right)


def compose_xt(
    spec: GroupSpec,
    x1: np.ndarray,
    t1: np.ndarray,
    x2: np.ndarray,
    t2: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Group law on raw coordinate arrays (broadcasts over leading axes)."""
    return x1 + x2, t1 + t2 + bilinear_t(spec, x1, x2)


def compose(spec: GroupSpec, p: Point, q: Point) -> Point:
    _require_conforming(spec, p, q)
    x, t = compose_xt(spec, p.x, p.t, q.x, q.t)
    return Point(x, t)


def inverse(spec: GroupSpec, p: Point) -> Point:
    _require_conforming(spec, p)
    return Point(-p.x, -p.t)


def dilate(spec: GroupSpec, lam: float, p: Point) -> Point:
    if lam <= 0:
        raise StructureError(f"dilation factor must be positive, got {lam}")
    _require_conforming(spec, p)
    return Point(lam * p.x, lam * lam * p.t)


def homogeneous_dimension(spec: GroupSpec) -> int:
    """Scaling dimension Q = m + 2n of the dilations (lam x, lam^2 t)."""
    return spec.m + 2 * spec.n


def origin(spec: GroupSpec) -> Point:
    return Point(np.zeros(spec.m), np.zeros(spec.n))


def group_from_config(cfg: dict) -> GroupSpec:
    """Build a group from a JSON-style dict.

    Accepted forms:
      {"type": "heisenberg", "d": 1}
      {"type": "quaternionic"}
      {"type": "abelian", "m": 3}
      {"type": "matrices", "m": ..., "n": ..., "A": [[[...]]], "tolerance": ...}
    """
    kind = cfg.get("type")
    if kind == "heisenberg":
        return make_heisenberg(int(cfg["d"]))
    if kind == "quaternionic":
        return make_quaternionic()
    if kind == "abelian":
        return make_abelian(int(cfg["m"]))
    if kind == "matrices":
        m = int(cfg["m"])
        n = int(cfg["n"])
        mats = np.asarray(cfg["A"], dtype=float)
        tol = float(cfg.get("tolerance", DEFAULT_MATRIX_TOLERANCE))
        return GroupSpec(m=m, n=n, matrices=mats, tolerance=tol, name=cfg.get("name", "custom"))
    raise StructureError(f"unknown group type {kind!r}")


def group_to_config(spec: GroupSpec) -> dict:
    return {
        "type": "matrices",
        "m": spec.m,
        "n": spec.n,
        "A": spec.matrices.tolist(),
        "tolerance": spec.tolerance,
        "name": spec.name,
    }


def load_group(path: str) -> GroupSpec:
    with open(path, "r", encoding="utf-8") as fh:
        return group_from_config(json.load(fh))
