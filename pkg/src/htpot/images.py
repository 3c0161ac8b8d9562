"""Reflection (method-of-images) Green-function candidates on wedges and strips.

Domains
-------
* ``Wedge``: an intersection of half-spaces {x_k > a_k} over distinct
  horizontal indices; one index is a half-space, two a quadrant.  The
  candidate is the signed sum of the fundamental solution over the 2^l
  subset-reflections of the pole, sign (-1)^(number of reflections).
* ``Strip``: {0 < x_l < a}.  The candidate is the doubly infinite series over
  translated poles (y_l - 2aj, +) and reflected poles (-y_l + 2aj, -),
  truncated either at a fixed index or by a rigorous tail bound.

Boundary behaviour is *measured*, not assumed.  In abelian mode the
construction is the classical one and traces vanish (exactly, in floating
point, by pairwise cancellation).  For a non-abelian group the bilinear term
of the group law shifts the vertical part of pole differences, the reflected
terms no longer match on the reflecting hyperplanes, and the trace is genuinely
nonzero away from the centre manifold {x = 0}; ``boundary_trace_scan`` reports
both the overall maximum and the (vanishing) maximum over x = 0 samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError, PoleError, StructureError, TruncationError
from .fundamental import FundamentalSolutionParams, _pow_quarter, gauge_fourth, gamma_from_fourth, gamma_partials
from .groups import GroupSpec, Point
from .operators import ResidualReport

__all__ = [
    "Wedge",
    "Strip",
    "half_space",
    "quadrant",
    "ImageCharge",
    "TruncationPolicy",
    "TraceReport",
    "Hyperplane",
    "CharacteristicSet",
    "reflect",
    "wedge_images",
    "strip_images",
    "green_eval",
    "green_eval_grid",
    "green_pole_values",
    "resolve_truncation_index",
    "strip_tail_bound",
    "boundary_trace_scan",
    "green_symmetry_check",
    "green_pole_gradient",
    "characteristic_points",
    "domain_from_config",
    "domain_to_config",
]


@dataclass(frozen=True)
class Wedge:
    """Intersection of half-spaces {x_k > a_k}; indices are 1-based and distinct."""

    indices: tuple[int, ...]
    offsets: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        idx = tuple(int(k) for k in self.indices)
        offs = tuple(float(a) for a in self.offsets) if self.offsets else (0.0,) * len(idx)
        if len(idx) == 0:
            raise StructureError("a wedge needs at least one reflecting index")
        if len(set(idx)) != len(idx):
            raise StructureError(f"reflecting indices must be distinct, got {idx}")
        if any(k < 1 for k in idx):
            raise StructureError(f"reflecting indices are 1-based, got {idx}")
        if len(offs) != len(idx):
            raise StructureError("offsets must match reflecting indices")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "offsets", offs)

    @property
    def order(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class Strip:
    """{0 < x_l < width} for a 1-based horizontal index l."""

    index: int
    width: float

    def __post_init__(self) -> None:
        if self.index < 1:
            raise StructureError(f"strip index is 1-based, got {self.index}")
        if self.width <= 0:
            raise StructureError(f"strip width must be positive, got {self.width}")


Domain = Wedge | Strip


def half_space(index: int = 1, offset: float = 0.0) -> Wedge:
    return Wedge((index,), (offset,))


def quadrant(indices: tuple[int, int] = (1, 2), offsets: tuple[float, float] = (0.0, 0.0)) -> Wedge:
    return Wedge(tuple(indices), tuple(offsets))


def domain_from_config(cfg: dict) -> Domain:
    kind = cfg.get("kind")
    if kind == "wedge":
        return Wedge(tuple(cfg["indices"]), tuple(cfg.get("offsets", ())))
    if kind == "half_space":
        return half_space(int(cfg.get("index", 1)), float(cfg.get("offset", 0.0)))
    if kind == "quadrant":
        return quadrant(tuple(cfg.get("indices", (1, 2))), tuple(cfg.get("offsets", (0.0, 0.0))))
    if kind == "strip":
        return Strip(int(cfg.get("index", 1)), float(cfg["width"]))
    raise StructureError(f"unknown domain kind {cfg.get('kind')!r}")


def domain_to_config(domain: Domain) -> dict:
    if isinstance(domain, Wedge):
        return {"kind": "wedge", "indices": list(domain.indices), "offsets": list(domain.offsets)}
    return {"kind": "strip", "index": domain.index, "width": domain.width}


@dataclass(frozen=True)
class ImageCharge:
    point: Point
    sign: int


@dataclass(frozen=True)
class TruncationPolicy:
    """Either a fixed image index cutoff or a tolerance met via the tail bound."""

    mode: str  # "fixed" or "tolerance"
    J: int | None = None
    tol: float | None = None

    def __post_init__(self) -> None:
        if self.mode == "fixed":
            if not self.J or self.J < 1:
                raise StructureError("fixed truncation needs J >= 1")
        elif self.mode == "tolerance":
            if not self.tol or self.tol <= 0:
                raise StructureError("tolerance truncation needs tol > 0")
        else:
            raise StructureError(f"unknown truncation mode {self.mode!r}")

    @staticmethod
    def fixed(J: int) -> "TruncationPolicy":
        return TruncationPolicy("fixed", J=int(J))

    @staticmethod
    def tolerance(tol: float = 1e-8) -> "TruncationPolicy":
        return TruncationPolicy("tolerance", tol=float(tol))


DEFAULT_TRUNCATION = TruncationPolicy.tolerance(1e-8)
_MAX_STRIP_J = 1 << 21


@dataclass(frozen=True)
class TraceReport:
    points: list[Point]
    values: np.ndarray
    max_abs: float
    zero_subset_max: float

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "max_abs": self.max_abs,
            "zero_subset_max": self.zero_subset_max,
        }


@dataclass(frozen=True)
class _AffineImage:
    """x-part map y -> (flip ? -y : y) + shift, slotwise; the t-part is untouched."""

    sign: int
    flip: np.ndarray  # (m,) bool
    shift: np.ndarray  # (m,)

    def apply(self, y: np.ndarray) -> np.ndarray:
        return np.where(self.flip, -y, y) + self.shift


def _check_pole_inside(pole: Point, domain: Domain, spec: GroupSpec) -> None:
    if not pole.conforms(spec):
        raise StructureError("pole does not conform to the group")
    if isinstance(domain, Wedge):
        if max(domain.indices) > spec.m:
            raise StructureError(f"wedge indices {domain.indices} exceed m={spec.m}")
        for k, a in zip(domain.indices, domain.offsets):
            if not pole.x[k - 1] > a:
                raise DomainError(f"pole must satisfy x_{k} > {a}, got {pole.x[k - 1]}")
    else:
        if domain.index > spec.m:
            raise StructureError(f"strip index {domain.index} exceeds m={spec.m}")
        y = pole.x[domain.index - 1]
        if not 0.0 < y < domain.width:
            raise DomainError(f"pole must satisfy 0 < x_{domain.index} < {domain.width}, got {y}")


def point_in_closure(p: Point, domain: Domain) -> bool:
    if isinstance(domain, Wedge):
        return all(p.x[k - 1] >= a for k, a in zip(domain.indices, domain.offsets))
    v = p.x[domain.index - 1]
    return 0.0 <= v <= domain.width


def reflect(pole: Point, k: int, offset: float = 0.0) -> Point:
    """Mirror the x_k coordinate across {x_k = offset}; everything else is kept."""
    if not 1 <= k <= len(pole.x):
        raise StructureError(f"reflection index {k} out of range 1..{len(pole.x)}")
    x = pole.x.copy()
    x[k - 1] = 2.0 * offset - x[k - 1]
    return Point(x, pole.t)


def _wedge_subsets(order: int) -> list[tuple[int, ...]]:
    """All index subsets ordered by (size, lexicographic positions)."""
    positions = list(range(order))
    out: list[tuple[int, ...]] = [()]
    from itertools import combinations

    for size in range(1, order + 1):
        out.extend(combinations(positions, size))
    return out


def _wedge_maps(domain: Wedge, m: int) -> list[_AffineImage]:
    maps = []
    for subset in _wedge_subsets(domain.order):
        flip = np.zeros(m, dtype=bool)
        shift = np.zeros(m)
        for pos in subset:
            k = domain.indices[pos] - 1
            flip[k] = True
            shift[k] = 2.0 * domain.offsets[pos]
        maps.append(_AffineImage(sign=(-1) ** len(subset), flip=flip, shift=shift))
    return maps


def _strip_j_order(J: int) -> list[int]:
    order = [0]
    for j in range(1, J + 1):
        order.extend((j, -j))
    return order


def _strip_maps(domain: Strip, m: int, J: int) -> list[_AffineImage]:
    l = domain.index - 1
    a = domain.width
    maps = []
    for j in _strip_j_order(J):
        shift_p = np.zeros(m)
        shift_p[l] = -2.0 * a * j
        maps.append(_AffineImage(sign=+1, flip=np.zeros(m, dtype=bool), shift=shift_p))
        flip = np.zeros(m, dtype=bool)
        flip[l] = True
        shift_m = np.zeros(m)
        shift_m[l] = 2.0 * a * j
        maps.append(_AffineImage(sign=-1, flip=flip, shift=shift_m))
    return maps


def wedge_images(pole: Point, domain: Wedge, spec: GroupSpec | None = None) -> list[ImageCharge]:
    """The 2^l signed reflections of the pole; the principal charge comes first."""
    if spec is not None:
        _check_pole_inside(pole, domain, spec)
    elif any(pole.x[k - 1] == a for k, a in zip(domain.indices, domain.offsets)):
        raise DomainError("pole lies on a reflecting hyperplane")
    return [
        ImageCharge(Point(mp.apply(pole.x), pole.t), mp.sign)
        for mp in _wedge_maps(domain, len(pole.x))
    ]


def strip_images(pole: Point, domain: Strip, J: int, spec: GroupSpec | None = None) -> list[ImageCharge]:
    """Charges for |j| <= J in pair order (+, j), (-, j) with j = 0, 1, -1, 2, -2, ..."""
    if J < 0:
        raise StructureError("strip truncation index must be >= 0")
    if spec is not None:
        _check_pole_inside(pole, domain, spec)
    else:
        y = pole.x[domain.index - 1]
        if not 0.0 < y < domain.width:
            raise DomainError("pole must lie strictly inside the strip")
    return [
        ImageCharge(Point(mp.apply(pole.x), pole.t), mp.sign)
        for mp in _strip_maps(domain, len(pole.x), J)
    ]


def _domain_maps(domain: Domain, spec: GroupSpec, J: int | None) -> list[_AffineImage]:
    if isinstance(domain, Wedge):
        return _wedge_maps(domain, spec.m)
    if J is None:
        raise StructureError("strip evaluation needs a truncation index")
    return _strip_maps(domain, spec.m, J)


def _signed_gamma_terms(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    maps: Sequence[_AffineImage],
    x: np.ndarray,
    t: np.ndarray,
    pole: Point,
) -> np.ndarray:
    """Matrix (P, I) of signed Gamma terms at points (x, t) for each image."""
    P = x.shape[0]
    out = np.empty((P, len(maps)))
    for col, mp in enumerate(maps):
        yi = mp.apply(pole.x)
        dx = x - yi
        if spec.n:
            v = np.einsum("kji,i->kj", spec.matrices, -yi)  # rows A_k(-yi)
            tt = t - pole.t + 0.5 * (x @ v.T)
        else:
            tt = t
        out[:, col] = mp.sign * gamma_from_fourth(params, gauge_fourth(spec, dx, tt))
    return out


def _principal_gamma(
    params: FundamentalSolutionParams, spec: GroupSpec, point: Point, pole: Point
) -> float:
    dx = point.x - pole.x
    if spec.n:
        v = np.einsum("kji,i->kj", spec.matrices, -pole.x)
        tt = point.t - pole.t + 0.5 * (point.x @ v.T)
    else:
        tt = point.t
    return float(gamma_from_fourth(params, gauge_fourth(spec, dx, tt)))


def strip_tail_bound(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Strip,
    pole: Point,
    point: Point,
    J: int,
) -> float:
    """Upper bound on the absolute sum of all pairs with |j| > J.

    Each discarded pair combines two gauge terms whose gauges exceed
    rho_j = 2a|j| - y_l - x_l, while their gauges differ by a bounded amount;
    the mean-value bound on r -> r^(2-Q) then gives a per-pair bound whose
    j-sum is controlled by an integral comparison.  The bound is rigorous for
    every configuration with the pole inside the strip and the point in its
    closure, and is monotone decreasing in J.
    """
    if J < 1:
        raise TruncationError("tail bound needs J >= 1")
    _check_pole_inside(pole, domain, spec)
    if not point_in_closure(point, domain):
        raise DomainError("point must lie in the closed strip")
    l = domain.index - 1
    a = domain.width
    Q = params.Q
    x_l = abs(float(point.x[l]))
    y_l = float(pole.x[l])
    dx_other = point.x - pole.x
    r2 = float(np.dot(dx_other, dx_other) - dx_other[l] ** 2)
    if spec.n:
        yp = pole.x.copy()
        yp[l] = 0.0
        ay = spec.matrices @ yp  # (n, m) rows A_k y'
        gam = point.t - pole.t - 0.5 * (ay @ point.x)
        w = spec.matrices @ point.x  # rows A_k x
        gam_norm = float(np.linalg.norm(gam))
        w_norm = float(np.linalg.norm(w[:, l]))
    else:
        gam_norm = 0.0
        w_norm = 0.0
    j1 = J + 1
    rho = 2.0 * a * j1 - y_l - x_l
    s_bar = 2.0 * a * j1 + y_l
    num = 4.0 * s_bar * (x_l * (2.0 * r2 + 2.0 * x_l**2 + 2.0 * s_bar**2) + 8.0 * gam_norm * w_norm)
    m_ratio = num / rho**3
    series = rho ** (1.0 - Q) + rho ** (2.0 - Q) / (2.0 * a * (Q - 2.0))
    return 0.5 * params.c * (Q - 2.0) * m_ratio * series


def _select_strip_J(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Strip,
    pole: Point,
    point: Point,
    tol: float,
) -> int:
    target = tol * abs(_principal_gamma(params, spec, point, pole))
    if target <= 0:
        raise TruncationError("tolerance target is zero; principal term vanished")
    J = 4
    while strip_tail_bound(params, spec, domain, pole, point, J) > target:
        J *= 2
        if J > _MAX_STRIP_J:
            raise TruncationError(
                f"strip series needs J > {_MAX_STRIP_J} for tol={tol:g}; use a fixed-J policy"
            )
    return J


def _resolve_J(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    pole: Point,
    point: Point,
    truncation: TruncationPolicy,
) -> int | None:
    if isinstance(domain, Wedge):
        return None
    if truncation.mode == "fixed":
        return truncation.J
    return _select_strip_J(params, spec, domain, pole, point, truncation.tol)


def resolve_truncation_index(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    pole: Point,
    point: Point,
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> int | None:
    """Truncation index a policy selects for this configuration (None for wedges)."""
    return _resolve_J(params, spec, domain, pole, point, truncation)


def green_eval(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    point: Point,
    pole: Point,
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> float:
    """Signed image sum at a single point (the pole must be interior).

    The point may lie anywhere in the closed domain; evaluation within gauge
    distance 1e-9 of any retained image pole raises ``PoleError`` (inside the
    open domain that can only happen at the pole itself).
    """
    _check_pole_inside(pole, domain, spec)
    if not point.conforms(spec):
        raise StructureError("point does not conform to the group")
    if not point_in_closure(point, domain):
        raise DomainError("evaluation point lies outside the closed domain")
    J = _resolve_J(params, spec, domain, pole, point, truncation)
    maps = _domain_maps(domain, spec, J)
    terms = _signed_gamma_terms(params, spec, maps, point.x[None, :], point.t[None, :], pole)
    return math.fsum(terms[0].tolist())


def green_eval_grid(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    x: np.ndarray,
    t: np.ndarray,
    pole: Point,
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
    point_block: int = 64,
) -> np.ndarray:
    """Vectorised image sum over many evaluation points (exact per-point sums).

    With a tolerance policy the truncation index is chosen once, at the first
    point, and then kept fixed across the grid so the evaluated function is a
    single smooth candidate.
    """
    _check_pole_inside(pole, domain, spec)
    x = np.atleast_2d(np.asarray(x, dtype=float))
    t = np.asarray(t, dtype=float).reshape(x.shape[0], spec.n)
    first = Point(x[0], t[0])
    if not point_in_closure(first, domain):
        raise DomainError("evaluation points must lie in the closed domain")
    J = _resolve_J(params, spec, domain, pole, first, truncation)
    maps = _domain_maps(domain, spec, J)
    values = np.empty(x.shape[0])
    for start in range(0, x.shape[0], point_block):
        stop = min(start + point_block, x.shape[0])
        terms = _signed_gamma_terms(params, spec, maps, x[start:stop], t[start:stop], pole)
        values[start:stop] = [math.fsum(row.tolist()) for row in terms]
    return values


def boundary_trace_scan(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    pole: Point,
    samples: Sequence[Point],
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> TraceReport:
    """Evaluate the candidate at boundary samples and report trace sizes.

    ``zero_subset_max`` is the maximum over samples on the centre manifold
    (x identically zero), where cancellation is analytically forced; the
    overall ``max_abs`` is a measurement, not an assertion.
    """
    pts = list(samples)
    if not pts:
        return TraceReport([], np.zeros(0), 0.0, 0.0)
    x = np.stack([p.x for p in pts])
    t = np.stack([p.t for p in pts]) if spec.n else np.zeros((len(pts), 0))
    values = green_eval_grid(params, spec, domain, x, t, pole, truncation)
    max_abs = float(np.max(np.abs(values)))
    on_center = np.all(x == 0.0, axis=1)
    zero_max = float(np.max(np.abs(values[on_center]))) if np.any(on_center) else 0.0
    return TraceReport(pts, values, max_abs, zero_max)


def green_symmetry_check(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    pairs: Sequence[tuple[Point, Point]],
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
) -> ResidualReport:
    """Residuals G(p, q) - G(q, p) over interior pairs (a diagnostic, not an axiom)."""
    residuals = []
    for p, q in pairs:
        gpq = green_eval(params, spec, domain, p, q, truncation)
        gqp = green_eval(params, spec, domain, q, p, truncation)
        residuals.append(gpq - gqp)
    res = np.asarray(residuals)
    return ResidualReport([p for p, _ in pairs], res, float(np.max(np.abs(res))) if len(res) else 0.0)


def green_pole_gradient(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    point: Point,
    pole_x: np.ndarray,
    pole_t: np.ndarray,
    truncation: TruncationPolicy = DEFAULT_TRUNCATION,
    J: int | None = None,
) -> np.ndarray:
    """Horizontal gradient of G(point, .) in its second (pole-side) argument.

    ``pole_x``/``pole_t`` may carry a leading batch axis; returns (..., m).
    Each image map is affine in the pole, so the chain rule pulls the closed
    form partials of Gamma back through the per-slot flip signs, and the
    horizontal fields contribute their first-order coefficients at the actual
    integration point.
    """
    pole_x = np.atleast_2d(np.asarray(pole_x, dtype=float))
    pole_t = np.asarray(pole_t, dtype=float).reshape(pole_x.shape[0], spec.n)
    if J is None and isinstance(domain, Strip):
        if truncation.mode != "fixed":
            raise TruncationError(
                "strip gradient series needs a fixed truncation index (tail control covers values only)"
            )
        J = truncation.J
    maps = _domain_maps(domain, spec, J)
    P = pole_x.shape[0]
    x = point.x
    dy = np.zeros((P, spec.m))
    dtau = np.zeros((P, spec.n))
    w = np.einsum("kji,i->kj", spec.matrices, x) if spec.n else None  # rows A_k x
    for mp in maps:
        yi = np.where(mp.flip, -pole_x, pole_x) + mp.shift
        dx = x - yi
        if spec.n:
            tt = point.t - pole_t - 0.5 * np.einsum("kji,pi,j->pk", spec.matrices, yi, x)
        else:
            tt = pole_t
        gx, gt = gamma_partials(params, spec, dx, tt)
        dsign = np.where(mp.flip, -1.0, 1.0)
        if spec.n:
            cross = 0.5 * np.einsum("kj,pk->pj", w, gt)
            dy += mp.sign * dsign * (-gx + cross)
            dtau += mp.sign * (-gt)
        else:
            dy += mp.sign * dsign * (-gx)
    if spec.n == 0:
        return dy
    coeff = 0.5 * np.einsum("kji,pi->pkj", spec.matrices, pole_x)  # 0.5 (A_k y)_j
    return dy + np.einsum("pkj,pk->pj", coeff, dtau)


def _kahan_add(acc: np.ndarray, comp: np.ndarray, term: np.ndarray) -> None:
    y = term - comp
    s = acc + y
    comp[...] = (s - acc) - y
    acc[...] = s


def green_pole_values(
    params: FundamentalSolutionParams,
    spec: GroupSpec,
    domain: Domain,
    point: Point,
    pole_x: np.ndarray,
    pole_t: np.ndarray,
    J: int | None = None,
    max_block: int = 4_000_000,
    exclude_principal: bool = False,
) -> np.ndarray:
    """G(point, pole_q) over a batch of poles, for quadrature of the second slot.

    Strips use an incremental kernel: every image differs from the base pole
    only in the strip coordinate, so the gauge reduces to outer products of
    per-pole and per-image quantities without materialising image arrays.
    Accumulation over images is compensated and runs in the emission order.
    With ``exclude_principal`` only the reflected terms are summed; that part
    of the kernel is harmonic and smooth wherever the poles stay inside the
    open domain.
    """
    pole_x = np.atleast_2d(np.asarray(pole_x, dtype=float))
    pole_t = np.asarray(pole_t, dtype=float).reshape(pole_x.shape[0], spec.n)
    x, t = point.x, point.t
    P = pole_x.shape[0]
    acc = np.zeros(P)
    comp = np.zeros(P)
    if isinstance(domain, Wedge):
        maps = _wedge_maps(domain, spec.m)
        if exclude_principal:
            maps = maps[1:]
        for mp in maps:
            yi = np.where(mp.flip, -pole_x, pole_x) + mp.shift
            dx = x - yi
            if spec.n:
                tt = t - pole_t - 0.5 * np.einsum("kji,pi,j->pk", spec.matrices, yi, x)
            else:
                tt = pole_t
            term = mp.sign * gamma_from_fourth(params, gauge_fourth(spec, dx, tt))
            _kahan_add(acc, comp, term)
        return acc
    if J is None:
        raise StructureError("strip quadrature kernel needs an explicit truncation index")
    l = domain.index - 1
    a = domain.width
    sigma = []
    shift = []
    for j in _strip_j_order(J):
        sigma.extend((1.0, -1.0))
        shift.extend((-2.0 * a * j, 2.0 * a * j))
    sigma_arr = np.asarray(sigma)
    shift_arr = np.asarray(shift)
    if exclude_principal:
        sigma_arr = sigma_arr[1:]
        shift_arr = shift_arr[1:]
    signs = np.where(sigma_arr > 0, 1.0, -1.0)
    dx_other = x - pole_x
    r2 = np.sum(np.square(dx_other), axis=1) - np.square(dx_other[:, l])
    if spec.n:
        yp = pole_x.copy()
        yp[:, l] = 0.0
        base = t - pole_t - 0.5 * np.einsum("kji,pi,j->pk", spec.matrices, yp, x)  # (P, n)
        wl = (spec.matrices @ x)[:, l]  # (n,)
    block = max(1, int(max_block // max(P, 1)))
    x_l = x[l]
    exponent = params.exponent
    for start in range(0, len(sigma_arr), block):
        stop = min(start + block, len(sigma_arr))
        s = sigma_arr[start:stop, None] * pole_x[None, :, l] + shift_arr[start:stop, None]  # (B, P)
        u = x_l - s
        n4 = np.square(r2[None, :] + np.square(u))
        if spec.n:
            for k in range(spec.n):
                n4 += 16.0 * np.square(base[None, :, k] + 0.5 * wl[k] * s)
        if np.min(n4) < 1e-36:
            raise PoleError("quadrature node coincides with an image pole")
        block_sum = np.einsum("b,bp->p", signs[start:stop], params.c * _pow_quarter(n4, exponent))
        _kahan_add(acc, comp, block_sum)
    return acc


@dataclass(frozen=True)
class Hyperplane:
    coord: str  # "x" or "t"
    index: int  # 1-based
    value: float = 0.0


@dataclass(frozen=True)
class CharacteristicSet:
    kind: str  # "empty" or "center_manifold"
    description: str


def characteristic_points(spec: GroupSpec, hyperplane: Hyperplane) -> CharacteristicSet:
    """Classify where all horizontal fields are tangent to a coordinate hyperplane.

    Horizontal hyperplanes {x_l = v} are never characteristic (X_l has a unit
    normal component).  Vertical hyperplanes {t_k = v} are characteristic
    exactly on {x = 0}: tangency of every X_j needs A_k x = 0, and A_k is
    invertible.
    """
    if hyperplane.coord == "x":
        if not 1 <= hyperplane.index <= spec.m:
            raise StructureError(f"x-index {hyperplane.index} out of range 1..{spec.m}")
        return CharacteristicSet("empty", "no characteristic points on a horizontal hyperplane")
    if hyperplane.coord == "t":
        if spec.n == 0:
            raise StructureError("abelian mode has no vertical hyperplanes")
        if not 1 <= hyperplane.index <= spec.n:
            raise StructureError(f"t-index {hyperplane.index} out of range 1..{spec.n}")
        return CharacteristicSet(
            "center_manifold",
            "characteristic exactly on x = 0 (A_k x = 0 forces x = 0 by orthogonality)",
        )
    raise StructureError(f"unknown hyperplane coordinate {hyperplane.coord!r}")
