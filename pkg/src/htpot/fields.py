"""Ready-made scalar fields: coordinates, constants, and Gaussian bumps."""

from __future__ import annotations

import numpy as np

from .errors import StructureError
from .geometry import Box
from .groups import GroupSpec, Point
from .operators import ScalarField

__all__ = ["constant_field", "coordinate_field", "gaussian_bump", "bump_support_box", "field_from_config"]


def constant_field(value: float) -> ScalarField:
    return ScalarField(
        eval=lambda p: value,
        label=f"const({value})",
        eval_many=lambda x, t: np.full(x.shape[0], float(value)),
    )


def coordinate_field(coord: str, index: int) -> ScalarField:
    """The coordinate function x_index or t_index (1-based)."""
    if coord not in ("x", "t") or index < 1:
        raise StructureError(f"bad coordinate {coord!r}[{index}]")
    i = index - 1
    if coord == "x":
        return ScalarField(lambda p: float(p.x[i]), f"x{index}", lambda x, t: x[:, i].copy())
    return ScalarField(lambda p: float(p.t[i]), f"t{index}", lambda x, t: t[:, i].copy())


def gaussian_bump(center: Point, radius: float, amplitude: float = 1.0) -> ScalarField:
    """amplitude * exp(-(|x - cx|^2 + |t - ct|^2) / radius^2)."""
    if radius <= 0:
        raise StructureError(f"bump radius must be positive, got {radius}")
    cx, ct = center.x, center.t
    inv = 1.0 / (radius * radius)

    def many(x: np.ndarray, t: np.ndarray) -> np.ndarray:
        d2 = np.sum(np.square(x - cx), axis=-1)
        if ct.size:
            d2 = d2 + np.sum(np.square(t - ct), axis=-1)
        return amplitude * np.exp(-d2 * inv)

    return ScalarField(
        eval=lambda p: float(many(p.x[None, :], p.t[None, :])[0]),
        label=f"gaussian(r={radius})",
        eval_many=many,
    )


def bump_support_box(center: Point, radius: float, sigmas: float = 6.0) -> Box:
    """Declared support box of a Gaussian bump (tails below ~1e-15 at 6 sigma)."""
    half = sigmas * radius
    xb = np.stack([center.x - half, center.x + half], axis=1)
    tb = np.stack([center.t - half, center.t + half], axis=1) if center.t.size else np.zeros((0, 2))
    return Box(xb, tb)


def field_from_config(cfg: dict, spec: GroupSpec) -> tuple[ScalarField, Box | None]:
    """Field plus its declared support box from a JSON-style dict."""
    kind = cfg.get("kind")
    if kind == "zero":
        return constant_field(0.0), None
    if kind == "gaussian_bump":
        center = Point(np.asarray(cfg["center"]["x"], dtype=float), np.asarray(cfg["center"].get("t", []), dtype=float))
        if not center.conforms(spec):
            raise StructureError("bump centre does not conform to the group")
        radius = float(cfg["radius"])
        amplitude = float(cfg.get("amplitude", 1.0))
        box = bump_support_box(center, radius, float(cfg.get("support_sigmas", 6.0)))
        return gaussian_bump(center, radius, amplitude), box
    raise StructureError(f"unknown field kind {kind!r}")
