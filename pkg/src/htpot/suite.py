"""Seeded verification suite behind the ``verify`` command.

Every check is deterministic for a fixed seed.  Checks come in two classes:
``pass``/``fail`` checks assert an invariant against a threshold, while
``reported`` checks publish a measured quantity without judging it (used for
the boundary-trace and symmetry diagnostics of non-abelian image candidates,
which are genuinely nonzero away from the centre manifold).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from . import boundary, fundamental, images, operators
from .fields import coordinate_field
from .geometry import Box
from .groups import (
    GroupSpec,
    Point,
    compose,
    dilate,
    homogeneous_dimension,
    inverse,
    make_abelian,
    make_heisenberg,
    make_quaternionic,
    origin,
    validate_group,
)

__all__ = ["SuiteCheck", "SuiteResult", "run_suite", "builtin_groups"]


@dataclass(frozen=True)
class SuiteCheck:
    name: str
    status: str  # "pass" | "fail" | "reported"
    metric: float
    threshold: float | None
    details: str = ""

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "status": self.status,
            "metric": self.metric,
            "threshold": self.threshold,
            "details": self.details,
        }


@dataclass
class SuiteResult:
    seed: int
    checks: list[SuiteCheck] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(c.status != "fail" for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "checks": [c.to_dict() for c in self.checks],
            "overall": "pass" if self.overall_pass else "fail",
        }


def builtin_groups() -> dict[str, GroupSpec]:
    return {
        "heisenberg_1": make_heisenberg(1),
        "heisenberg_2": make_heisenberg(2),
        "quaternionic": make_quaternionic(),
        "abelian_3": make_abelian(3),
    }


def _gate(name: str, metric: float, threshold: float, details: str = "") -> SuiteCheck:
    status = "pass" if metric <= threshold else "fail"
    return SuiteCheck(name, status, float(metric), float(threshold), details)


def _report(name: str, metric: float, details: str) -> SuiteCheck:
    return SuiteCheck(name, "reported", float(metric), None, details)


def _random_points(rng: np.random.Generator, spec: GroupSpec, count: int, scale: float) -> list[Point]:
    xs = rng.uniform(-scale, scale, size=(count, spec.m))
    ts = rng.uniform(-scale, scale, size=(count, spec.n))
    return [Point(x, t) for x, t in zip(xs, ts)]


def _check_group_laws(rng: np.random.Generator, groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    worst_assoc = 0.0
    worst_unit = 0.0
    worst_dil = 0.0
    for spec in groups.values():
        p = _random_points(rng, spec, 200, 10.0)
        q = _random_points(rng, spec, 200, 10.0)
        r = _random_points(rng, spec, 200, 10.0)
        e = origin(spec)
        for a, b, c in zip(p, q, r):
            lhs = compose(spec, compose(spec, a, b), c)
            rhs = compose(spec, a, compose(spec, b, c))
            worst_assoc = max(
                worst_assoc,
                float(np.max(np.abs(lhs.x - rhs.x))),
                float(np.max(np.abs(lhs.t - rhs.t), initial=0.0)),
            )
            back = compose(spec, a, inverse(spec, a))
            worst_unit = max(worst_unit, float(np.max(np.abs(back.x))), float(np.max(np.abs(back.t), initial=0.0)))
            ea = compose(spec, e, a)
            worst_unit = max(worst_unit, float(np.max(np.abs(ea.x - a.x))), float(np.max(np.abs(ea.t - a.t), initial=0.0)))
            for lam in (0.5, 2.0, 10.0):
                left = dilate(spec, lam, compose(spec, a, b))
                right = compose(spec, dilate(spec, lam, a), dilate(spec, lam, b))
                scale = max(1.0, float(np.max(np.abs(left.x))), float(np.max(np.abs(left.t), initial=0.0)))
                worst_dil = max(
                    worst_dil,
                    float(np.max(np.abs(left.x - right.x))) / scale,
                    float(np.max(np.abs(left.t - right.t), initial=0.0)) / scale,
                )
    return [
        _gate("group.associativity", worst_assoc, 1e-10),
        _gate("group.identity_inverse", worst_unit, 1e-12),
        _gate("group.dilation_automorphism", worst_dil, 1e-10),
    ]


def _check_validation(groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    ok = all(validate_group(g).passed for g in groups.values())
    bad = GroupSpec(m=2, n=1, matrices=np.eye(2)[np.newaxis])
    caught = not validate_group(bad).passed
    return [_gate("group.matrix_validation", 0.0 if (ok and caught) else 1.0, 0.5)]


def _check_gauge(rng: np.random.Generator, groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    worst_hom = 0.0
    worst_inv = 0.0
    worst_left = 0.0
    worst_dist = 0.0
    for spec in groups.values():
        params = fundamental.params_for(spec)
        Q = homogeneous_dimension(spec)
        for p in _random_points(rng, spec, 50, 3.0):
            if fundamental.gauge(spec, p).value < 1e-3:
                continue
            gp = fundamental.gamma(params, spec, p)
            for lam in (0.5, 2.0, 5.0):
                gd = fundamental.gamma(params, spec, dilate(spec, lam, p))
                worst_hom = max(worst_hom, abs(gd - lam ** (2 - Q) * gp) / abs(gp))
            worst_inv = max(worst_inv, abs(fundamental.gamma(params, spec, inverse(spec, p)) - gp))
        pts = _random_points(rng, spec, 25, 2.0)
        shifts = _random_points(rng, spec, 25, 2.0)
        for p, q, g in zip(pts, reversed(pts), shifts):
            if float(np.max(np.abs(p.x - q.x))) < 1e-6:
                continue
            base = fundamental.gamma_pole(params, spec, p, q)
            moved = fundamental.gamma_pole(params, spec, compose(spec, g, p), compose(spec, g, q))
            worst_left = max(worst_left, abs(moved - base) / abs(base))
            d1 = fundamental.quasi_distance(params, spec, p, q)
            d2 = fundamental.quasi_distance(params, spec, q, p)
            worst_dist = max(worst_dist, abs(d1 - d2) / max(d1, 1e-30))
            for lam in (0.5, 2.0):
                dd = fundamental.quasi_distance(params, spec, dilate(spec, lam, p), dilate(spec, lam, q))
                worst_dist = max(worst_dist, abs(dd - lam * d1) / max(lam * d1, 1e-30))
    return [
        _gate("gauge.homogeneity", worst_hom, 1e-10),
        _gate("gauge.inversion_symmetry", worst_inv, 0.0),
        _gate("gauge.left_invariance", worst_left, 1e-10),
        _gate("gauge.distance_symmetry_scaling", worst_dist, 1e-10),
    ]


def _gamma_field(params, spec, pole: Point) -> operators.ScalarField:
    def many(x: np.ndarray, t: np.ndarray) -> np.ndarray:
        dx, tt = fundamental.pole_shift(spec, x, t, pole.x, pole.t)
        return fundamental.gamma_from_fourth(params, fundamental.gauge_fourth(spec, dx, tt))

    return operators.ScalarField(
        eval=lambda p: float(many(p.x[None, :], p.t[None, :])[0]),
        label="gamma_pole",
        eval_many=many,
    )


def _shell_points(rng: np.random.Generator, spec: GroupSpec, pole: Point, count: int,
                  lo: float = 0.6, hi: float = 1.4) -> list[Point]:
    pts = []
    while len(pts) < count:
        cand = Point(rng.uniform(-2, 2, spec.m), rng.uniform(-2, 2, spec.n))
        shifted = compose(spec, inverse(spec, pole), cand)
        dist = fundamental.gauge(spec, shifted).value
        if lo <= dist <= hi:
            pts.append(cand)
    return pts


def _check_operators(rng: np.random.Generator, groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    checks = []
    h1 = groups["heisenberg_1"]
    params = fundamental.params_for(h1)
    pole = Point(rng.uniform(-1, 1, h1.m), rng.uniform(-1, 1, h1.n))
    gamma_f = _gamma_field(params, h1, pole)
    stencil = operators.StencilSpec(h=1e-4)
    worst_grad = 0.0
    for p in _shell_points(rng, h1, pole, 20):
        ana = fundamental.horizontal_gradient_gamma(params, h1, p, pole)
        num = operators.horizontal_gradient(h1, gamma_f, p, stencil)
        worst_grad = max(worst_grad, float(np.max(np.abs(ana - num)) / max(np.max(np.abs(ana)), 1e-30)))
    checks.append(_gate("operators.gradient_closed_form_vs_stencil", worst_grad, 1e-5))

    worst_lin = 0.0
    for name, spec in groups.items():
        u = coordinate_field("x", 1)
        for p in _random_points(rng, spec, 25, 2.0):
            worst_lin = max(worst_lin, abs(operators.apply_sublaplacian(spec, u, p, operators.StencilSpec(1e-3))))
    checks.append(_gate("operators.linear_field_harmonic", worst_lin, 1e-9))

    quad_field = operators.ScalarField(
        eval=lambda p: float(np.dot(p.x, p.x)),
        label="|x|^2",
        eval_many=lambda x, t: np.sum(np.square(x), axis=1),
    )
    worst_quad = 0.0
    for p in _random_points(rng, h1, 10, 2.0):
        worst_quad = max(worst_quad, abs(operators.apply_sublaplacian(h1, quad_field, p, operators.StencilSpec(1e-3)) - 2 * h1.m))
    checks.append(_gate("operators.quadratic_exactness", worst_quad, 1e-6))

    smooth = operators.ScalarField(
        eval=lambda p: float(np.sin(p.x[0]) * np.cos(p.t[0] if p.t.size else 0.0) + p.x[-1] ** 2),
        label="smooth",
        eval_many=lambda x, t: np.sin(x[:, 0]) * np.cos(t[:, 0] if t.shape[1] else np.zeros(len(x))) + x[:, -1] ** 2,
    )
    worst_form = 0.0
    for p in _random_points(rng, h1, 10, 1.5):
        a = operators.apply_sublaplacian(h1, smooth, p, operators.StencilSpec(1e-3))
        b = operators.apply_sublaplacian_composed(h1, smooth, p, operators.StencilSpec(1e-3))
        worst_form = max(worst_form, abs(a - b))
    checks.append(_gate("operators.expanded_vs_composed", worst_form, 1e-5))

    rep = operators.harmonicity_residual(h1, gamma_f, _shell_points(rng, h1, pole, 15), operators.StencilSpec(1e-3))
    order = rep.convergence_order or 0.0
    checks.append(_gate("operators.gamma_harmonicity_order", abs(order - 2.0), 0.35,
                        f"max residual {rep.max_abs:.3e}, order {order:.3f}"))
    return checks


def _check_images(rng: np.random.Generator, groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    checks = []
    h1 = groups["heisenberg_1"]
    quat = groups["quaternionic"]
    ab = groups["abelian_3"]

    # Combinatorics against explicit subset enumeration.
    combinatorics_ok = True
    spec = quat
    pole = Point(np.arange(1.0, spec.m + 1.0), np.full(spec.n, 0.25))
    for l in (1, 2, 3, 4):
        wedge = images.Wedge(tuple(range(1, l + 1)))
        charges = images.wedge_images(pole, wedge, spec)
        got = {(tuple(ch.point.x), ch.sign) for ch in charges}
        expected = set()
        for size in range(l + 1):
            for subset in combinations(range(1, l + 1), size):
                x = pole.x.copy()
                for k in subset:
                    x[k - 1] = -x[k - 1]
                expected.add((tuple(x), (-1) ** size))
        if len(charges) != 2**l or got != expected:
            combinatorics_ok = False
        for size in range(l + 1):
            level_count = sum(
                1 for ch in charges if sum(1 for a, b in zip(ch.point.x, pole.x) if a != b) == size
            )
            if level_count != math.comb(l, size):
                combinatorics_ok = False
    checks.append(_gate("images.wedge_combinatorics", 0.0 if combinatorics_ok else 1.0, 0.5))

    # Every non-principal image lies strictly outside its domain.
    outside_ok = True
    pole = Point(np.array([0.6, 0.9]), np.array([0.3]))
    for ch in images.wedge_images(pole, images.quadrant(), h1)[1:]:
        if all(ch.point.x[k - 1] > 0 for k in (1, 2)):
            outside_ok = False
    strip = images.Strip(1, 1.0)
    for ch in images.strip_images(pole, strip, 6, h1):
        inside = 0.0 < ch.point.x[0] < 1.0
        principal = ch.sign == 1 and ch.point.x[0] == pole.x[0]
        if inside and not principal:
            outside_ok = False
    checks.append(_gate("images.nonprincipal_outside", 0.0 if outside_ok else 1.0, 0.5))

    # Strip truncation control and decay rate.
    params = fundamental.params_for(h1)
    worst_gap = 0.0
    for _ in range(10):
        a = float(rng.uniform(0.6, 1.6))
        strip = images.Strip(1, a)
        pole = Point(np.array([rng.uniform(0.2, 0.8) * a, rng.uniform(-1, 1)]), rng.uniform(-1, 1, 1))
        pt = Point(np.array([rng.uniform(0.2, 0.8) * a, rng.uniform(-1, 1)]), rng.uniform(-1, 1, 1))
        if abs(pt.x[0] - pole.x[0]) < 0.05 * a:
            continue
        J = int(rng.integers(2, 10))
        s_j = images.green_eval(params, h1, strip, pt, pole, images.TruncationPolicy.fixed(J))
        s_2j = images.green_eval(params, h1, strip, pt, pole, images.TruncationPolicy.fixed(2 * J))
        bound = images.strip_tail_bound(params, h1, strip, pole, pt, J)
        gap = abs(s_j - s_2j)
        worst_gap = max(worst_gap, gap - bound)
    checks.append(_gate("images.strip_tail_bound", worst_gap, 0.0))

    strip = images.Strip(1, 1.0)
    pole = Point(np.array([0.45, 0.2]), np.array([0.1]))
    pt = Point(np.array([0.6, -0.3]), np.array([-0.2]))
    js = np.arange(8, 65)
    pair_sizes = []
    for j in js:
        charges = images.strip_images(pole, strip, int(j), h1)
        plus, minus = charges[-2], charges[-1]
        term = fundamental.gamma_pole(params, h1, pt, plus.point) - fundamental.gamma_pole(params, h1, pt, minus.point)
        pair_sizes.append(abs(term))
    slope = float(np.polyfit(np.log(js), np.log(pair_sizes), 1)[0])
    expected = 1 - homogeneous_dimension(h1)
    checks.append(_gate("images.strip_pair_decay_exponent", abs(slope - expected), 0.3,
                        f"fitted {slope:.3f}, expected {expected}"))

    # Centre-manifold trace vanishes for every group and domain kind.
    worst_center = 0.0
    for spec in (h1, quat, ab):
        params_g = fundamental.params_for(spec)
        pole = Point(np.linspace(0.5, 0.9, spec.m), np.linspace(-0.2, 0.3, spec.n) if spec.n else np.zeros(0))
        domains: list[images.Domain] = [images.half_space(), images.Strip(1, 1.0)]
        if spec.m >= 2:
            domains.append(images.quadrant())
        for dom in domains:
            samples = [Point(np.zeros(spec.m), rng.uniform(-1, 1, spec.n)) for _ in range(4)]
            rep = images.boundary_trace_scan(params_g, spec, dom, pole, samples,
                                             images.TruncationPolicy.fixed(40))
            scale = abs(fundamental.gamma_pole(params_g, spec, samples[0], pole))
            worst_center = max(worst_center, rep.zero_subset_max / max(scale, 1e-300))
    checks.append(_gate("images.center_manifold_trace", worst_center, 1e-12))

    # Abelian candidates: trace and symmetry are classical.
    params_ab = fundamental.params_for(ab)
    pole = Point(np.array([0.7, 0.1, -0.3]), np.zeros(0))
    worst_ab = 0.0
    for dom in (images.half_space(), images.quadrant(), images.Wedge((1, 2, 3)), images.Strip(1, 1.0)):
        if isinstance(dom, images.Wedge):
            pole_d = Point(np.abs(pole.x) + 0.3, np.zeros(0))
            trunc = images.TruncationPolicy.fixed(4)
        else:
            # The strip trace decays like J^-2 through the truncation edge.
            pole_d = Point(np.array([0.4, 0.1, -0.3]), np.zeros(0))
            trunc = images.TruncationPolicy.fixed(80000)
        samples = _abelian_boundary_samples(rng, ab, dom)
        rep = images.boundary_trace_scan(params_ab, ab, dom, pole_d, samples, trunc)
        scale = abs(fundamental.gamma_pole(params_ab, ab, samples[0], pole_d))
        worst_ab = max(worst_ab, rep.max_abs / max(scale, 1e-300))
    checks.append(_gate("images.abelian_boundary_trace", worst_ab, 1e-10))

    pairs = []
    for _ in range(5):
        p = Point(np.array([rng.uniform(0.2, 1.5), rng.uniform(-1, 1), rng.uniform(-1, 1)]), np.zeros(0))
        q = Point(np.array([rng.uniform(0.2, 1.5), rng.uniform(-1, 1), rng.uniform(-1, 1)]), np.zeros(0))
        if float(np.max(np.abs(p.x - q.x))) > 1e-3:
            pairs.append((p, q))
    sym = images.green_symmetry_check(params_ab, ab, images.half_space(), pairs)
    checks.append(_gate("images.abelian_symmetry", sym.max_abs, 1e-12))

    # Pinned non-abelian diagnostic: gauge^4 values 40 and 8, trace reported.
    params1 = fundamental.params_for(h1)
    zeta = Point(np.array([1.0, 0.0]), np.array([0.0]))
    xi = Point(np.array([0.0, 1.0]), np.array([1.0]))
    shifted = compose(h1, inverse(h1, zeta), xi)
    n4_principal = fundamental.gauge(h1, shifted).fourth_power
    mirrored = images.reflect(zeta, 1)
    n4_reflected = fundamental.gauge(h1, compose(h1, inverse(h1, mirrored), xi)).fourth_power
    pin = max(abs(n4_principal - 40.0), abs(n4_reflected - 8.0))
    checks.append(_gate("images.pinned_gauge_fourth_values", pin, 1e-12,
                        f"principal {n4_principal!r}, reflected {n4_reflected!r}"))
    trace = images.green_eval(params1, h1, images.half_space(), xi, zeta)
    expected_trace = 40.0**-0.5 - 8.0**-0.5
    checks.append(_report(
        "images.halfspace_trace_offcenter",
        trace,
        f"nonzero boundary trace at the pinned configuration; expected {expected_trace!r} "
        "(reflection does not cancel the bilinear vertical shift off the centre manifold)",
    ))
    sym_pairs = [(Point(np.array([0.8, 0.2]), np.array([0.1])), Point(np.array([0.5, -0.4]), np.array([-0.3])))]
    sym1 = images.green_symmetry_check(params1, h1, images.half_space(), sym_pairs)
    checks.append(_report("images.halfspace_symmetry_offcenter", sym1.max_abs,
                          "measured |G(p,q) - G(q,p)| on the first Heisenberg group"))

    # Characteristic sets of coordinate hyperplanes.
    char_ok = (
        images.characteristic_points(h1, images.Hyperplane("x", 1)).kind == "empty"
        and images.characteristic_points(h1, images.Hyperplane("t", 1)).kind == "center_manifold"
        and images.characteristic_points(ab, images.Hyperplane("x", 1)).kind == "empty"
    )
    checks.append(_gate("images.characteristic_classification", 0.0 if char_ok else 1.0, 0.5))
    return checks


def _abelian_boundary_samples(rng: np.random.Generator, spec: GroupSpec, dom: images.Domain) -> list[Point]:
    samples = []
    if isinstance(dom, images.Wedge):
        for k, a in zip(dom.indices, dom.offsets):
            for _ in range(4):
                x = rng.uniform(-1.5, 1.5, spec.m)
                for kk, aa in zip(dom.indices, dom.offsets):
                    x[kk - 1] = aa + abs(x[kk - 1])
                x[k - 1] = a
                samples.append(Point(x, np.zeros(spec.n)))
    else:
        for value in (0.0, dom.width):
            for _ in range(4):
                x = rng.uniform(-1.5, 1.5, spec.m)
                x[dom.index - 1] = value
                samples.append(Point(x, np.zeros(spec.n)))
    return samples


def _check_layer_reduction(rng: np.random.Generator, groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    from .geometry import Face

    worst = 0.0
    for spec in (groups["heisenberg_1"], groups["quaternionic"]):
        params = fundamental.params_for(spec)
        dom = images.half_space()
        point = Point(np.concatenate([[0.9], rng.uniform(-0.5, 0.5, spec.m - 1)]), rng.uniform(-0.5, 0.5, spec.n))
        for _ in range(20):
            zx = rng.uniform(-1.0, 1.0, spec.m)
            zx[0] = 0.0
            zt = rng.uniform(-1.0, 1.0, spec.n)
            grad = images.green_pole_gradient(params, spec, dom, point, zx[None, :], zt[None, :])
            face = Face("x", 0, 0.0, -1, np.zeros((spec.m + spec.n - 1, 2)))
            reduced = boundary.face_integrand(spec, grad, zx[None, :], face)
            brute = boundary.face_integrand_bruteforce(spec, grad, zx[None, :], face)
            worst = max(worst, float(np.max(np.abs(reduced - brute))))
    return [_gate("solver.layer_face_reduction", worst, 1e-12)]


def _check_flux_quick(groups: dict[str, GroupSpec]) -> list[SuiteCheck]:
    worst = 0.0
    for name in ("abelian_3", "heisenberg_1"):
        spec = groups[name]
        # Flat t-extent keeps the gauge's complex zeros well away from the faces.
        box1 = Box(np.tile([-1.0, 1.0], (spec.m, 1)), np.tile([-0.25, 0.25], (spec.n, 1)))
        box2 = Box(np.tile([-0.95, 0.85], (spec.m, 1)), np.tile([-0.28, 0.28], (spec.n, 1)))
        c = fundamental.calibrate_c(spec, box1, nodes_per_axis=24)
        check = fundamental.flux(fundamental.params_for(spec, c), spec, box2, nodes_per_axis=24)
        worst = max(worst, abs(check + 1.0))
    return [_gate("gauge.flux_box_invariance_2d", worst, 1e-6)]


def run_suite(seed: int = 0) -> SuiteResult:
    """Run every check with a fresh deterministic generator per section."""
    groups = builtin_groups()
    result = SuiteResult(seed=seed)
    result.checks += _check_group_laws(np.random.default_rng(seed), groups)
    result.checks += _check_validation(groups)
    result.checks += _check_gauge(np.random.default_rng(seed + 1), groups)
    result.checks += _check_operators(np.random.default_rng(seed + 2), groups)
    result.checks += _check_images(np.random.default_rng(seed + 3), groups)
    result.checks += _check_layer_reduction(np.random.default_rng(seed + 4), groups)
    result.checks += _check_flux_quick(groups)
    return result
