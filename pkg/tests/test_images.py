import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import htpot
from htpot import images
from htpot.errors import DomainError, StructureError, TruncationError

from conftest import random_points


def test_reflect_examples():
    zeta = htpot.Point.of([1, 2], [3])
    out = htpot.reflect(zeta, 1)
    assert np.array_equal(out.x, [-1.0, 2.0]) and out.t[0] == 3.0
    back = htpot.reflect(out, 1)
    assert np.array_equal(back.x, zeta.x) and np.array_equal(back.t, zeta.t)
    fixed = htpot.reflect(htpot.Point.of([1.0, 5.0], [0.0]), 1, offset=1.0)
    assert fixed.x[0] == 1.0


@settings(max_examples=40, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-3, 3), st.floats(-2, 2))
def test_reflect_involution_property(y1, y2, tau, offset):
    # Exact for reflections through 0; otherwise 2a - (2a - y) commits one rounding.
    zeta = htpot.Point.of([y1, y2], [tau])
    back = htpot.reflect(htpot.reflect(zeta, 2, offset), 2, offset)
    if offset == 0.0:
        assert np.array_equal(back.x, zeta.x)
    else:
        assert np.allclose(back.x, zeta.x, rtol=0, atol=8e-16 * (abs(y2) + abs(2 * offset) + 1))
    assert np.array_equal(back.t, zeta.t)


def test_half_space_images(h1):
    zeta = htpot.Point.of([0.7, -0.3], [0.4])
    charges = htpot.wedge_images(zeta, htpot.half_space(), h1)
    assert len(charges) == 2
    assert charges[0].sign == 1 and np.array_equal(charges[0].point.x, zeta.x)
    assert charges[1].sign == -1 and np.array_equal(charges[1].point.x, [-0.7, -0.3])
    assert np.array_equal(charges[1].point.t, zeta.t)


def test_quadrant_images_signs(h1):
    zeta = htpot.Point.of([0.6, 0.9], [0.1])
    charges = htpot.wedge_images(zeta, htpot.quadrant(), h1)
    by_x = {tuple(ch.point.x): ch.sign for ch in charges}
    assert by_x[(0.6, 0.9)] == 1
    assert by_x[(-0.6, -0.9)] == 1
    assert by_x[(-0.6, 0.9)] == -1
    assert by_x[(0.6, -0.9)] == -1


def test_three_wedge_level_two_terms(quaternionic):
    # The double reflections over pairs {1,2}, {1,3}, {2,3} and nothing else.
    zeta = htpot.Point.of([1.0, 2.0, 3.0, 4.0], [0.1, 0.2, 0.3])
    charges = htpot.wedge_images(zeta, htpot.Wedge((1, 2, 3)), quaternionic)
    level2 = {
        tuple(ch.point.x)
        for ch in charges
        if sum(1 for a, b in zip(ch.point.x, zeta.x) if a != b) == 2
    }
    assert level2 == {
        (-1.0, -2.0, 3.0, 4.0),
        (-1.0, 2.0, -3.0, 4.0),
        (1.0, -2.0, -3.0, 4.0),
    }
    assert all(ch.sign == 1 for ch in charges if tuple(ch.point.x) in level2)


@pytest.mark.parametrize("order", [1, 2, 3, 4])
def test_wedge_combinatorics_brute_force(order, quaternionic):
    # Oracle: explicit enumeration of index subsets.
    zeta = htpot.Point(np.arange(1.0, 5.0), np.array([0.3, -0.2, 0.5]))
    charges = htpot.wedge_images(zeta, htpot.Wedge(tuple(range(1, order + 1))), quaternionic)
    assert len(charges) == 2**order
    expected = set()
    for size in range(order + 1):
        for subset in combinations(range(1, order + 1), size):
            x = zeta.x.copy()
            for k in subset:
                x[k - 1] = -x[k - 1]
            expected.add((tuple(x), (-1) ** size))
    assert {(tuple(ch.point.x), ch.sign) for ch in charges} == expected
    for size in range(order + 1):
        level = [ch for ch in charges if sum(a != b for a, b in zip(ch.point.x, zeta.x)) == size]
        assert len(level) == math.comb(order, size)
        assert all(ch.sign == (-1) ** size for ch in level)


def test_wedge_order_independence(quaternionic):
    zeta = htpot.Point(np.arange(1.0, 5.0), np.zeros(3))
    a = htpot.wedge_images(zeta, htpot.Wedge((1, 2, 3)), quaternionic)
    b = htpot.wedge_images(zeta, htpot.Wedge((3, 1, 2)), quaternionic)
    assert {(tuple(ch.point.x), ch.sign) for ch in a} == {(tuple(ch.point.x), ch.sign) for ch in b}


def test_wedge_rejects_bad_poles(h1):
    with pytest.raises(DomainError):
        htpot.wedge_images(htpot.Point.of([0.0, 1.0], [0.0]), htpot.half_space(), h1)
    with pytest.raises(DomainError):
        htpot.wedge_images(htpot.Point.of([-0.5, 1.0], [0.0]), htpot.half_space(), h1)
    with pytest.raises(StructureError):
        htpot.Wedge((1, 1))


def test_strip_images_layout(h1):
    zeta = htpot.Point.of([0.3, 1.0], [0.5])
    strip = htpot.Strip(1, 1.0)
    charges = htpot.strip_images(zeta, strip, 3, h1)
    assert len(charges) == 2 * (2 * 3 + 1)
    # Pair order (+, j), (-, j) with j = 0, 1, -1, 2, -2, ...
    lcoords = [ch.point.x[0] for ch in charges[:6]]
    assert lcoords == [0.3, -0.3, 0.3 - 2.0, -0.3 + 2.0, 0.3 + 2.0, -0.3 - 2.0]
    assert [ch.sign for ch in charges[:6]] == [1, -1, 1, -1, 1, -1]
    for ch in charges:
        inside = 0.0 < ch.point.x[0] < 1.0
        assert not inside or (ch.sign == 1 and ch.point.x[0] == zeta.x[0])
        assert np.array_equal(ch.point.t, zeta.t)
    with pytest.raises(DomainError):
        htpot.strip_images(htpot.Point.of([1.5, 0.0], [0.0]), strip, 2, h1)


def test_green_eval_abelian_matches_classical(abelian3):
    # Oracle: the textbook image form c (|x-y|^-1 - |x-y*|^-1).
    params = htpot.params_for(abelian3, c=0.25)
    rng = np.random.default_rng(8)
    dom = htpot.half_space()
    for _ in range(20):
        y = np.array([rng.uniform(0.1, 2.0), rng.uniform(-2, 2), rng.uniform(-2, 2)])
        x = np.array([rng.uniform(0.0, 2.0), rng.uniform(-2, 2), rng.uniform(-2, 2)])
        if np.linalg.norm(x - y) < 1e-2:
            continue
        ystar = y.copy()
        ystar[0] = -ystar[0]
        classical = 0.25 * (1.0 / np.linalg.norm(x - y) - 1.0 / np.linalg.norm(x - ystar))
        got = htpot.green_eval(params, abelian3, dom, htpot.Point(x, np.zeros(0)), htpot.Point(y, np.zeros(0)))
        assert got == pytest.approx(classical, rel=1e-13, abs=1e-15)


def test_green_eval_pinned_halfspace_value(h1):
    params = htpot.params_for(h1)
    value = htpot.green_eval(
        params, h1, htpot.half_space(), htpot.Point.of([0, 1], [1]), htpot.Point.of([1, 0], [0])
    )
    assert value == pytest.approx(40.0**-0.5 - 8.0**-0.5, rel=1e-14)


def test_green_eval_validation(h1):
    params = htpot.params_for(h1)
    dom = htpot.half_space()
    with pytest.raises(DomainError):
        htpot.green_eval(params, h1, dom, htpot.Point.of([-0.1, 0], [0]), htpot.Point.of([1, 0], [0]))
    with pytest.raises(DomainError):
        htpot.green_eval(params, h1, dom, htpot.Point.of([1, 0], [0]), htpot.Point.of([0, 0], [0]))


def test_green_eval_grid_matches_scalar(h1):
    params = htpot.params_for(h1)
    strip = htpot.Strip(1, 1.0)
    pole = htpot.Point.of([0.4, -0.2], [0.3])
    rng = np.random.default_rng(9)
    xs = np.column_stack([rng.uniform(0.05, 0.95, 8), rng.uniform(-1, 1, 8)])
    ts = rng.uniform(-1, 1, (8, 1))
    trunc = htpot.TruncationPolicy.fixed(25)
    grid_vals = images.green_eval_grid(params, h1, strip, xs, ts, pole, trunc)
    rerun = images.green_eval_grid(params, h1, strip, xs, ts, pole, trunc)
    assert np.array_equal(grid_vals, rerun)  # per-point determinism
    for i in range(8):
        single = htpot.green_eval(params, h1, strip, htpot.Point(xs[i], ts[i]), pole, trunc)
        assert grid_vals[i] == pytest.approx(single, rel=1e-12)


def test_strip_tail_bound_controls_truncation(h1):
    params = htpot.params_for(h1)
    rng = np.random.default_rng(10)
    checked = 0
    for _ in range(60):
        a = float(rng.uniform(0.5, 2.0))
        strip = htpot.Strip(1, a)
        pole = htpot.Point(np.array([rng.uniform(0.1, 0.9) * a, rng.uniform(-1, 1)]), rng.uniform(-1, 1, 1))
        pt = htpot.Point(np.array([rng.uniform(0.1, 0.9) * a, rng.uniform(-1, 1)]), rng.uniform(-1, 1, 1))
        if htpot.quasi_distance(params, h1, pt, pole) < 0.05:
            continue
        J = int(rng.integers(1, 12))
        s_j = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.fixed(J))
        s_2j = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.fixed(2 * J))
        s_3j = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.fixed(3 * J))
        bound = htpot.strip_tail_bound(params, h1, strip, pole, pt, J)
        assert abs(s_j - s_2j) <= bound
        assert abs(s_j - s_3j) <= bound
        assert htpot.strip_tail_bound(params, h1, strip, pole, pt, 2 * J) < bound
        checked += 1
    assert checked >= 50


def test_strip_tail_bound_needs_positive_J(h1):
    params = htpot.params_for(h1)
    strip = htpot.Strip(1, 1.0)
    with pytest.raises(TruncationError):
        htpot.strip_tail_bound(params, h1, strip, htpot.Point.of([0.5, 0], [0]), htpot.Point.of([0.4, 0], [0]), 0)


def test_strip_pair_decay_exponent(h1):
    params = htpot.params_for(h1)
    strip = htpot.Strip(1, 1.0)
    pole = htpot.Point.of([0.45, 0.2], [0.1])
    pt = htpot.Point.of([0.6, -0.3], [-0.2])
    js = np.arange(8, 65)
    sizes = []
    for j in js:
        charges = images.strip_images(pole, strip, int(j), h1)
        plus, minus = charges[-2], charges[-1]
        pair = htpot.gamma_pole(params, h1, pt, plus.point) - htpot.gamma_pole(params, h1, pt, minus.point)
        sizes.append(abs(pair))
    slope = np.polyfit(np.log(js), np.log(sizes), 1)[0]
    assert abs(slope - (1 - 4)) <= 0.3


def test_tolerance_mode_meets_target(h1):
    params = htpot.params_for(h1)
    strip = htpot.Strip(1, 1.0)
    pole = htpot.Point.of([0.45, 0.2], [0.1])
    pt = htpot.Point.of([0.6, -0.3], [-0.2])
    val = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.tolerance(1e-8))
    ref = htpot.green_eval(params, h1, strip, pt, pole, htpot.TruncationPolicy.fixed(60000))
    assert abs(val - ref) <= 1e-8 * abs(htpot.gamma_pole(params, h1, pt, pole))


def test_tolerance_mode_refuses_hopeless_targets(abelian3):
    # The abelian strip tail decays like 1/J; 1e-12 would need J beyond the cap.
    params = htpot.params_for(abelian3)
    strip = htpot.Strip(1, 1.0)
    pole = htpot.Point.of([0.5, 0.0, 0.0])
    pt = htpot.Point.of([0.25, 0.3, -0.2])
    with pytest.raises(TruncationError):
        htpot.green_eval(params, abelian3, strip, pt, pole, htpot.TruncationPolicy.tolerance(1e-12))


def test_boundary_trace_abelian_wedges_exact(abelian3):
    params = htpot.params_for(abelian3)
    rng = np.random.default_rng(11)
    for dom in (htpot.half_space(), htpot.quadrant(), htpot.Wedge((1, 2, 3)), htpot.Wedge((1, 2), (0.4, -0.3))):
        pole_x = np.array([a + 0.4 for a in dom.offsets] + [0.5] * (3 - len(dom.indices)))
        pole = htpot.Point(pole_x, np.zeros(0))
        samples = []
        for k, a in zip(dom.indices, dom.offsets):
            for _ in range(5):
                x = rng.uniform(-1.5, 1.5, 3)
                for kk, aa in zip(dom.indices, dom.offsets):
                    x[kk - 1] = aa + abs(x[kk - 1])
                x[k - 1] = a
                samples.append(htpot.Point(x, np.zeros(0)))
        report = images.boundary_trace_scan(params, abelian3, dom, pole, samples)
        if all(a == 0.0 for a in dom.offsets):
            assert report.max_abs == 0.0  # bitwise pair cancellation
        else:
            scale = abs(htpot.gamma_pole(params, abelian3, samples[0], pole))
            assert report.max_abs <= 1e-14 * scale


def test_boundary_trace_abelian_strip(abelian3):
    params = htpot.params_for(abelian3)
    rng = np.random.default_rng(12)
    strip = htpot.Strip(1, 1.0)
    pole = htpot.Point.of([0.4, 0.1, -0.3])
    samples = []
    for value in (0.0, 1.0):
        for _ in range(6):
            x = rng.uniform(-1.5, 1.5, 3)
            x[0] = value
            samples.append(htpot.Point(x, np.zeros(0)))
    report = images.boundary_trace_scan(
        params, abelian3, strip, pole, samples, htpot.TruncationPolicy.fixed(80000)
    )
    scale = abs(htpot.gamma_pole(params, abelian3, samples[0], pole))
    assert report.max_abs <= 1e-10 * scale


def test_center_manifold_trace_zero(all_groups):
    rng = np.random.default_rng(13)
    for spec in all_groups.values():
        params = htpot.params_for(spec)
        pole = htpot.Point(np.linspace(0.4, 0.8, spec.m), np.linspace(-0.2, 0.2, spec.n))
        doms = [htpot.half_space(), htpot.Strip(1, 1.0), htpot.quadrant()]
        if spec.m >= 3:
            doms.append(htpot.Wedge((1, 2, 3)))
        for dom in doms:
            samples = [htpot.Point(np.zeros(spec.m), rng.uniform(-1, 1, spec.n)) for _ in range(5)]
            report = images.boundary_trace_scan(params, spec, dom, pole, samples, htpot.TruncationPolicy.fixed(40))
            assert report.zero_subset_max == 0.0
            assert report.max_abs >= report.zero_subset_max


def test_nonabelian_trace_reported_value(h1):
    # The pinned configuration: the scan must report the direct-evaluation value.
    params = htpot.params_for(h1)
    zeta = htpot.Point.of([1, 0], [0])
    sample = htpot.Point.of([0, 1], [1])
    report = images.boundary_trace_scan(params, h1, htpot.half_space(), zeta, [sample])
    expected = 40.0**-0.5 - 8.0**-0.5
    assert report.max_abs == pytest.approx(abs(expected), rel=1e-12)
    assert report.values[0] == pytest.approx(expected, rel=1e-12)
    assert report.zero_subset_max == 0.0  # no x = 0 samples in this scan


def test_symmetry_abelian_exact(abelian3):
    params = htpot.params_for(abelian3)
    rng = np.random.default_rng(14)
    pairs = []
    while len(pairs) < 8:
        p = htpot.Point(np.array([rng.uniform(0.2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)]), np.zeros(0))
        q = htpot.Point(np.array([rng.uniform(0.2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)]), np.zeros(0))
        if np.linalg.norm(p.x - q.x) > 0.05:
            pairs.append((p, q))
    report = images.green_symmetry_check(params, abelian3, htpot.half_space(), pairs)
    assert report.max_abs <= 1e-12


def test_symmetry_h1_measured_against_direct(h1):
    # Not assumed: the measured defect must equal the direct evaluation difference.
    params = htpot.params_for(h1)
    p = htpot.Point.of([0.8, 0.2], [0.1])
    q = htpot.Point.of([0.5, -0.4], [-0.3])
    dom = htpot.half_space()
    report = images.green_symmetry_check(params, h1, dom, [(p, q)])
    direct = htpot.green_eval(params, h1, dom, p, q) - htpot.green_eval(params, h1, dom, q, p)
    assert report.residuals[0] == direct
    assert report.max_abs > 1e-3  # genuinely asymmetric off the centre manifold


def test_characteristic_points(h1, abelian3):
    assert htpot.characteristic_points(h1, htpot.Hyperplane("x", 1)).kind == "empty"
    assert htpot.characteristic_points(h1, htpot.Hyperplane("t", 1)).kind == "center_manifold"
    assert htpot.characteristic_points(abelian3, htpot.Hyperplane("x", 2)).kind == "empty"
    with pytest.raises(StructureError):
        htpot.characteristic_points(abelian3, htpot.Hyperplane("t", 1))
    with pytest.raises(StructureError):
        htpot.characteristic_points(h1, htpot.Hyperplane("x", 5))
    with pytest.raises(StructureError):
        htpot.characteristic_points(h1, htpot.Hyperplane("z", 1))


def test_domain_config_roundtrip():
    for cfg in (
        {"kind": "wedge", "indices": [1, 3], "offsets": [0.0, 1.0]},
        {"kind": "half_space", "index": 2},
        {"kind": "quadrant"},
        {"kind": "strip", "index": 1, "width": 2.0},
    ):
        dom = images.domain_from_config(cfg)
        round_tripped = images.domain_from_config(images.domain_to_config(dom))
        assert round_tripped == dom
    with pytest.raises(StructureError):
        images.domain_from_config({"kind": "ball"})
