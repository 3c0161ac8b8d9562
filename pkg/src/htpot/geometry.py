"""Coordinate boxes, box faces, and tensor-product quadrature grids."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

import numpy as np

from .errors import StructureError
from .groups import GroupSpec, Point

__all__ = ["Box", "Face", "box_faces", "axis_nodes", "tensor_grid_chunks", "box_from_config"]


@dataclass(frozen=True)
class Box:
    """Axis-aligned box in group coordinates: bounds per x-axis and per t-axis."""

    x_bounds: np.ndarray  # (m, 2)
    t_bounds: np.ndarray  # (n, 2)

    def __post_init__(self) -> None:
        xb = np.asarray(self.x_bounds, dtype=float).reshape(-1, 2)
        tb = np.asarray(self.t_bounds, dtype=float).reshape(-1, 2)
        if np.any(xb[:, 1] <= xb[:, 0]) or np.any(tb[:, 1] <= tb[:, 0]):
            raise StructureError("box bounds must satisfy lo < hi on every axis")
        xb.setflags(write=False)
        tb.setflags(write=False)
        object.__setattr__(self, "x_bounds", xb)
        object.__setattr__(self, "t_bounds", tb)

    @property
    def dim(self) -> int:
        return len(self.x_bounds) + len(self.t_bounds)

    def bounds(self) -> np.ndarray:
        """All bounds stacked in coordinate order (x axes then t axes)."""
        return np.vstack([self.x_bounds, self.t_bounds]) if self.dim else np.zeros((0, 2))

    def contains(self, p: Point, strict: bool = True) -> bool:
        b = self.bounds()
        coords = np.concatenate([p.x, p.t])
        if strict:
            return bool(np.all(coords > b[:, 0]) and np.all(coords < b[:, 1]))
        return bool(np.all(coords >= b[:, 0]) and np.all(coords <= b[:, 1]))

    def to_config(self) -> dict:
        return {"x": self.x_bounds.tolist(), "t": self.t_bounds.tolist()}


def box_from_config(cfg: dict, spec: GroupSpec) -> Box:
    xb = np.asarray(cfg["x"], dtype=float)
    tb = np.asarray(cfg.get("t", []), dtype=float).reshape(-1, 2)
    if xb.shape != (spec.m, 2) or tb.shape != (spec.n, 2):
        raise StructureError(
            f"box axes ({xb.shape[0]} x, {tb.shape[0]} t) do not match group (m={spec.m}, n={spec.n})"
        )
    return Box(xb, tb)


@dataclass(frozen=True)
class Face:
    """One face of a box: a fixed coordinate plus the outward normal sign."""

    coord: str  # "x" or "t"
    index: int  # 0-based axis within the coordinate block
    value: float
    outward: int  # +1 on the upper face, -1 on the lower face
    free_bounds: np.ndarray  # (dim-1, 2), in coordinate order with the fixed axis removed

    @property
    def flat_index(self) -> int:
        raise NotImplementedError


def box_faces(box: Box) -> list[Face]:
    """All faces in a fixed deterministic order (x axes then t axes, lo then hi)."""
    faces = []
    all_bounds = box.bounds()
    m = len(box.x_bounds)
    for pos in range(box.dim):
        coord, index = ("x", pos) if pos < m else ("t", pos - m)
        free = np.delete(all_bounds, pos, axis=0)
        lo, hi = all_bounds[pos]
        faces.append(Face(coord, index, float(lo), -1, free))
        faces.append(Face(coord, index, float(hi), +1, free))
    return faces


@lru_cache(maxsize=64)
def _leggauss(k: int) -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.legendre.leggauss(k)


def axis_nodes(lo: float, hi: float, count: int, rule: str) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for one axis of a tensor product rule."""
    if count < 1:
        raise StructureError("node count must be >= 1")
    width = hi - lo
    if rule == "gauss":
        z, w = _leggauss(count)
        return lo + 0.5 * width * (z + 1.0), 0.5 * width * w
    if rule == "midpoint":
        h = width / count
        return lo + h * (np.arange(count) + 0.5), np.full(count, h)
    if rule == "trapezoid":
        if count < 2:
            raise StructureError("trapezoid rule needs >= 2 nodes per axis")
        h = width / (count - 1)
        w = np.full(count, h)
        w[0] = w[-1] = 0.5 * h
        return lo + h * np.arange(count), w
    raise StructureError(f"unknown quadrature rule {rule!r}")


def tensor_grid_chunks(
    bounds: np.ndarray,
    counts: np.ndarray,
    rule: str,
    max_chunk: int = 200_000,
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (points, weights) chunks of a tensor-product grid.

    ``bounds`` is (d, 2), ``counts`` the per-axis node counts.  Chunks iterate
    the leading axes in order, so concatenating all chunks gives the full grid
    in lexicographic node order (deterministic).
    """
    bounds = np.asarray(bounds, dtype=float).reshape(-1, 2)
    counts = np.broadcast_to(np.asarray(counts, dtype=int), (len(bounds),))
    d = len(bounds)
    if d == 0:
        yield np.zeros((1, 0)), np.ones(1)
        return
    axes = [axis_nodes(lo, hi, int(c), rule) for (lo, hi), c in zip(bounds, counts)]
    # Split axes into a leading "outer" block iterated in python and an inner
    # block vectorised with meshgrid, keeping inner sizes under max_chunk.
    inner_size = 1
    split = d
    for pos in range(d - 1, -1, -1):
        if inner_size * len(axes[pos][0]) > max_chunk and pos < d - 1:
            break
        inner_size *= len(axes[pos][0])
        split = pos
    inner_axes = axes[split:]
    inner_nodes = np.stack(
        [g.ravel() for g in np.meshgrid(*[a[0] for a in inner_axes], indexing="ij")], axis=-1
    ) if inner_axes else np.zeros((1, 0))
    inner_w = np.ones(1)
    for _, w in inner_axes:
        inner_w = np.multiply.outer(inner_w, w).ravel()
    if split == 0:
        yield inner_nodes, inner_w
        return
    outer_axes = axes[:split]
    outer_shape = [len(a[0]) for a in outer_axes]
    for flat in range(int(np.prod(outer_shape))):
        idx = np.unravel_index(flat, outer_shape)
        prefix = np.array([outer_axes[i][0][idx[i]] for i in range(split)])
        wout = float(np.prod([outer_axes[i][1][idx[i]] for i in range(split)]))
        pts = np.empty((len(inner_nodes), d))
        pts[:, :split] = prefix
        pts[:, split:] = inner_nodes
        yield pts, wout * inner_w
