"""Volume and layer potentials for Dirichlet problems on wedges and strips.

Sign conventions
----------------
With L Gamma_pole = -delta_pole, applying the integration-by-parts identity to
a decaying solution of L u = f, u = phi on the boundary, gives

    u(p) = - integral_D G(p, q) f(q) dq  -  sum_faces n_l integral_face phi (X_l G)(p, q) dsigma(q)

where n_l is the outward normal sign on the face.  ``volume_potential`` and
``layer_potential`` each return their term with these signs baked in, so
``solve`` is simply their sum.  The orientation is pinned by two classical
facts in abelian mode: the volume term applied to f = Delta u* returns +u*,
and the half-space layer kernel (the Poisson kernel) is nonnegative.

All integrals run over the declared compact support boxes of the data, with a
tensor-product midpoint rule (trapezoid optionally).  The quadrature cell
containing the evaluation point is subdivided once and the subcell containing
the pole is dropped; the committed error is O(cell^2) by local integrability
of the kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, StructureError
from .fundamental import FundamentalSolutionParams, gamma_from_fourth, gauge_fourth, pole_shift
from .geometry import Box, tensor_grid_chunks
from .groups import GroupSpec, Point
from .images import (
    DEFAULT_TRUNCATION,
    Domain,
    Strip,
    TruncationPolicy,
    Wedge,
    green_pole_gradient,
    green_pole_values,
    point_in_closure,
    resolve_truncation_index,
)
from .operators import ResidualReport, ScalarField, StencilSpec, apply_sublaplacian

__all__ = [
    "SupportedField",
    "FaceDatum",
    "ProblemSpec",
    "QuadratureSpec",
    "SolveReport",
    "domain_faces",
    "volume_potential",
    "volume_potential_many",
    "layer_potential_many",
    "represent_many",
    "layer_potential",
    "solve",
    "solution_field",
    "verify_solution",
]


@dataclass
class SupportedField:
    """A scalar field together with its declared compact support box."""

    field: ScalarField
    support: Box


@dataclass
class FaceDatum:
    """Boundary datum on one face {x_index = value} with outward sign ``outward``.

    ``support`` is a full-dimension box; its extent along the face axis is
    ignored (the face coordinate is fixed).  The datum must vanish near any
    other reflecting hyperplane: surface integration is face-by-face.
    """

    index: int
    value: float
    outward: int
    field: ScalarField
    support: Box


@dataclass
class ProblemSpec:
    domain: Domain
    f: SupportedField | None = None
    boundary_data: list[FaceDatum] = field(default_factory=list)


@dataclass(frozen=True)
class QuadratureSpec:
    """Node counts (an int, or a per-axis tuple) for volume and surface grids.

    ``image_volume_nodes``, when set, integrates the non-principal (smooth,
    harmonic) part of the kernel on its own, typically coarser, grid while the
    principal singular term keeps the full ``volume_nodes`` grid with pole
    excision.  Left unset, the whole kernel shares one grid.
    """

    volume_nodes: int | tuple[int, ...] = 32
    surface_nodes: int | tuple[int, ...] = 48
    rule: str = "midpoint"
    image_volume_nodes: int | tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.rule not in ("midpoint", "trapezoid"):
            raise StructureError(f"unsupported quadrature rule {self.rule!r}")
        for counts in (self.volume_nodes, self.surface_nodes, self.image_volume_nodes):
            if counts is None:
                continue
            arr = np.atleast_1d(np.asarray(counts, dtype=int))
            if np.any(arr < 2):
                raise StructureError("node counts must be >= 2 per active axis")

    def refined(self, factor: int = 2) -> "QuadratureSpec":
        def scale(counts):
            if counts is None:
                return None
            if np.isscalar(counts):
                return int(counts) * factor
            return tuple(int(c) * factor for c in counts)

        return QuadratureSpec(
            scale(self.volume_nodes), scale(self.surface_nodes), self.rule, scale(self.image_volume_nodes)
        )


@dataclass
class SolveReport:
    points: list[Point]
    values: np.ndarray
    interior_residual: ResidualReport | None = None
    boundary_mismatch: float | None = None
    self_convergence: float | None = None

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "interior_residual": self.interior_residual.to_dict() if self.interior_residual else None,
            "boundary_mismatch": self.boundary_mismatch,
            "self_convergence": self.self_convergence,
        }


def domain_faces(domain: Domain) -> list[tuple[int, float, int]]:
    """(1-based axis, coordinate value, outward sign) for every flat boundary face."""
    if isinstance(domain, Wedge):
        return [(k, a, -1) for k, a in zip(domain.indices, domain.offsets)]
    return [(domain.index, 0.0, -1), (domain.index, domain.width, +1)]


def _resolve_strip_J(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    point: Point,
    anchor: Point,
    truncation: TruncationPolicy,
) -> int | None:
    if not isinstance(domain, Strip):
        return None
    return resolve_truncation_index(params, spec, domain, anchor, point, truncation)


def _support_anchor(spec: GroupSpec, domain: Domain, support: Box) -> Point:
    """A pole position inside the domain used to pick a strip truncation index."""
    b = support.bounds()
    mid = 0.5 * (b[:, 0] + b[:, 1])
    p = Point(mid[: spec.m], mid[spec.m :])
    if isinstance(domain, Strip):
        x = p.x.copy()
        l = domain.index - 1
        x[l] = min(max(x[l], 0.25 * domain.width), 0.75 * domain.width)
        p = Point(x, p.t)
    return p


def volume_potential(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    f: SupportedField,
    point: Point,
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> float:
    """- integral G(point, q) f(q) dq over the declared support of f."""
    return float(volume_potential_many(params, spec, domain, f, [point], quad, truncation)[0])


def volume_potential_many(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    f: SupportedField,
    points: list[Point],
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> np.ndarray:
    """Batch form of ``volume_potential``: the grid and the values of f are
    generated once and shared by every evaluation point."""
    for point in points:
        if not point_in_closure(point, domain):
            raise DomainError("evaluation point lies outside the closed domain")
    if not points:
        return np.zeros(0)
    anchor = _support_anchor(spec, domain, f.support)
    J = _resolve_strip_J(params, spec, domain, points[0], anchor, truncation)
    if quad.image_volume_nodes is not None:
        out = _volume_quadrature_many(params, spec, domain, f, points, quad.volume_nodes, quad.rule, J, "principal")
        out += _volume_quadrature_many(
            params, spec, domain, f, points, quad.image_volume_nodes, quad.rule, J, "images"
        )
        return out
    return _volume_quadrature_many(params, spec, domain, f, points, quad.volume_nodes, quad.rule, J, "all")


def _volume_quadrature_many(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    f: SupportedField,
    points: list[Point],
    node_counts,
    rule: str,
    J: int | None,
    part: str,
) -> np.ndarray:
    bounds = f.support.bounds()
    d = len(bounds)
    counts = np.broadcast_to(np.asarray(node_counts, dtype=int), (d,)).copy()
    widths = (bounds[:, 1] - bounds[:, 0]) / counts

    def kernel(point: Point, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        if part == "principal":
            dx, tt = pole_shift(spec, x, t, point.x, point.t)
            return gamma_from_fourth(params, gauge_fourth(spec, dx, tt))
        return green_pole_values(params, spec, domain, point, x, t, J, exclude_principal=(part == "images"))

    singular = part != "images" and rule == "midpoint"
    drop_nodes: list[np.ndarray | None] = []
    cell_idxs: list[np.ndarray | None] = []
    for point in points:
        coords = np.concatenate([point.x, point.t])
        if singular and bool(np.all(coords > bounds[:, 0]) and np.all(coords < bounds[:, 1])):
            idx = np.clip(np.floor((coords - bounds[:, 0]) / widths).astype(int), 0, counts - 1)
            cell_idxs.append(idx)
            drop_nodes.append(bounds[:, 0] + widths * (idx + 0.5))
        else:
            cell_idxs.append(None)
            drop_nodes.append(None)
    partials: list[list[float]] = [[] for _ in points]
    for pts, w in tensor_grid_chunks(bounds, counts, rule):
        fv = f.field.values(pts[:, : spec.m], pts[:, spec.m :])
        live0 = fv != 0.0
        if not np.any(live0):
            continue
        for i, point in enumerate(points):
            live = live0
            if drop_nodes[i] is not None:
                hit = np.all(pts == drop_nodes[i], axis=1)
                if np.any(hit):
                    live = live0 & ~hit
                    if not np.any(live):
                        continue
            g = kernel(point, pts[live, : spec.m], pts[live, spec.m :])
            partials[i].append(float(np.sum(g * fv[live] * w[live])))
    for i, point in enumerate(points):
        if drop_nodes[i] is None:
            continue
        # One-level subdivision of the pole cell; the subcell with the pole is dropped.
        coords = np.concatenate([point.x, point.t])
        cell_lo = bounds[:, 0] + widths * cell_idxs[i]
        sub_w = float(np.prod(widths / 2.0))
        centres = np.array(
            [
                cell_lo + widths * (0.25 + 0.5 * np.array([(corner >> ax) & 1 for ax in range(d)]))
                for corner in range(1 << d)
            ]
        )
        inside = np.all(np.abs(coords - centres) <= 0.25 * widths * (1.0 + 1e-12), axis=1)
        pole_sub = int(np.argmax(inside)) if np.any(inside) else 0
        keep = np.delete(centres, pole_sub, axis=0)
        fv = f.field.values(keep[:, : spec.m], keep[:, spec.m :])
        live = fv != 0.0
        if np.any(live):
            g = kernel(point, keep[live, : spec.m], keep[live, spec.m :])
            partials[i].append(float(np.sum(g * fv[live]) * sub_w))
    return np.array([-math.fsum(parts) for parts in partials])


def layer_potential(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    data: list[FaceDatum],
    point: Point,
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> float:
    """- sum over faces of outward * integral phi (X_l G)(point, .) dsigma.

    On each coordinate face only the field along the face normal survives the
    pairing with the volume form, so the integrand is the single horizontal
    derivative X_l G taken in the pole slot.
    """
    return float(layer_potential_many(params, spec, domain, data, [point], quad, truncation)[0])


def layer_potential_many(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    data: list[FaceDatum],
    points: list[Point],
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> np.ndarray:
    """Batch form of ``layer_potential`` over shared face grids."""
    for point in points:
        if not point_in_closure(point, domain):
            raise DomainError("evaluation point lies outside the closed domain")
    if not points:
        return np.zeros(0)
    totals: list[list[float]] = [[] for _ in points]
    for datum in data:
        l = datum.index - 1
        bounds = np.delete(datum.support.bounds(), l, axis=0)
        counts = np.broadcast_to(np.asarray(quad.surface_nodes, dtype=int), (len(bounds),))
        J = None
        if isinstance(domain, Strip):
            anchor = _support_anchor(spec, domain, datum.support)
            J = resolve_truncation_index(params, spec, domain, anchor, points[0], truncation)
        for pts_free, w in tensor_grid_chunks(bounds, counts, quad.rule):
            pts = np.insert(pts_free, l, datum.value, axis=1)
            phi = datum.field.values(pts[:, : spec.m], pts[:, spec.m :])
            live = phi != 0.0
            if not np.any(live):
                continue
            for i, point in enumerate(points):
                grad = green_pole_gradient(
                    params, spec, domain, point, pts[live, : spec.m], pts[live, spec.m :], truncation, J=J
                )
                totals[i].append(-datum.outward * float(np.sum(phi[live] * grad[:, l] * w[live])))
    return np.array([math.fsum(parts) for parts in totals])


def represent_many(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    problem: ProblemSpec,
    points: list[Point],
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> np.ndarray:
    """Volume plus layer terms over a batch of evaluation points."""
    values = np.zeros(len(points))
    if problem.f is not None:
        values += volume_potential_many(params, spec, problem.domain, problem.f, points, quad, truncation)
    if problem.boundary_data:
        values += layer_potential_many(
            params, spec, problem.domain, problem.boundary_data, points, quad, truncation
        )
    return values


def solution_field(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    problem: ProblemSpec,
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> ScalarField:
    """The represented solution as a re-evaluable field (quadrature per call)."""

    def many(x: np.ndarray, t: np.ndarray) -> np.ndarray:
        pts = [Point(xi, ti) for xi, ti in zip(x, t)]
        return represent_many(params, spec, problem, pts, quad, truncation)

    def one(p: Point) -> float:
        return float(represent_many(params, spec, problem, [p], quad, truncation)[0])

    return ScalarField(eval=one, label="represented_solution", eval_many=many)


def solve(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    problem: ProblemSpec,
    eval_points: list[Point],
    quad: QuadratureSpec = QuadratureSpec(),
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
    residual_points: list[Point] | None = None,
    residual_stencil: StencilSpec | None = None,
    boundary_checks: list[tuple[Point, float]] | None = None,
    convergence_points: int = 3,
    convergence_factor: int = 2,
) -> SolveReport:
    """Evaluate the representation at the given points and attach diagnostics.

    Diagnostics: a stencil residual L u - f at ``residual_points`` (the whole
    field is re-evaluated by quadrature at each stencil node), the maximum
    |u - phi| over ``boundary_checks`` pairs, and a grid self-convergence
    gap |u_coarse - u_fine| over the first ``convergence_points`` points.
    """
    u = solution_field(params, spec, problem, quad, truncation)
    values = represent_many(params, spec, problem, list(eval_points), quad, truncation)
    self_conv = None
    if convergence_points > 0 and eval_points:
        sel = list(eval_points[: min(convergence_points, len(eval_points))])
        coarse = values[: len(sel)]
        fine = represent_many(params, spec, problem, sel, quad.refined(convergence_factor), truncation)
        self_conv = float(np.max(np.abs(coarse - fine)))
    residual = None
    if residual_points:
        stencil = residual_stencil or StencilSpec(h=1e-3)
        f_field = problem.f.field if problem.f is not None else None
        res = []
        for p in residual_points:
            lu = apply_sublaplacian(spec, u, p, stencil)
            fv = f_field.eval(p) if f_field is not None else 0.0
            res.append(lu - fv)
        res = np.asarray(res)
        residual = ResidualReport(list(residual_points), res, float(np.max(np.abs(res))))
    mismatch = None
    if boundary_checks:
        mismatch = float(max(abs(u.eval(p) - phi) for p, phi in boundary_checks))
    return SolveReport(list(eval_points), values, residual, mismatch, self_conv)


def verify_solution(
    spec: GroupSpec,
    u: ScalarField,
    interior_points: list[Point],
    stencil: StencilSpec = StencilSpec(),
    f: ScalarField | None = None,
    boundary_checks: list[tuple[Point, float]] | None = None,
) -> SolveReport:
    """Generic checker: stencil PDE residual plus boundary mismatch for any field."""
    res = []
    for p in interior_points:
        lu = apply_sublaplacian(spec, u, p, stencil)
        res.append(lu - (f.eval(p) if f is not None else 0.0))
    res = np.asarray(res)
    residual = ResidualReport(list(interior_points), res, float(np.max(np.abs(res))) if len(res) else 0.0)
    mismatch = None
    if boundary_checks:
        mismatch = float(max(abs(u.eval(p) - phi) for p, phi in boundary_checks))
    values = np.array([u.eval(p) for p in interior_points])
    return SolveReport(list(interior_points), values, residual, mismatch, None)
