import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import htpot
from htpot import groups
from htpot.errors import StructureError

from conftest import random_points


def test_heisenberg_matrix_passes(h1):
    report = htpot.validate_group(h1)
    assert report.passed
    assert report.skew_defects == ((1, 0.0),)


def test_identity_matrix_fails_skew():
    spec = groups.GroupSpec(m=2, n=1, matrices=np.eye(2)[np.newaxis])
    report = htpot.validate_group(spec)
    assert not report.passed
    assert report.skew_defects[0][1] == 2.0


def test_quaternionic_matrices_direct_arithmetic(quaternionic):
    # Oracle: direct 4x4 matrix arithmetic on the defining constraints.
    mats = quaternionic.matrices
    eye = np.eye(4)
    for a in mats:
        assert np.array_equal(a + a.T, np.zeros((4, 4)))
        assert np.array_equal(a.T @ a, eye)
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.array_equal(mats[i] @ mats[j], -(mats[j] @ mats[i]))
    assert htpot.validate_group(quaternionic).passed


def test_structural_mismatch_raises():
    with pytest.raises(StructureError):
        groups.GroupSpec(m=2, n=1, matrices=np.zeros((1, 3, 3)))
    with pytest.raises(StructureError):
        groups.GroupSpec(m=2, n=2, matrices=np.zeros((1, 2, 2)))


@pytest.mark.parametrize("d,m,Q", [(1, 2, 4), (2, 4, 6), (3, 6, 8)])
def test_heisenberg_family(d, m, Q):
    spec = htpot.make_heisenberg(d)
    assert (spec.m, spec.n) == (m, 1)
    assert htpot.homogeneous_dimension(spec) == Q
    assert htpot.validate_group(spec).passed


def test_heisenberg_rejects_bad_d():
    with pytest.raises(StructureError):
        htpot.make_heisenberg(0)


def test_quaternionic_dimension(quaternionic):
    assert htpot.homogeneous_dimension(quaternionic) == 10


def test_abelian_mode(abelian3):
    assert htpot.homogeneous_dimension(abelian3) == 3
    assert htpot.validate_group(abelian3).passed
    p = htpot.Point.of([1.0, 2.0, 3.0])
    q = htpot.Point.of([-0.5, 1.0, 0.25])
    out = htpot.compose(abelian3, p, q)
    assert np.array_equal(out.x, p.x + q.x)
    assert out.t.size == 0
    with pytest.raises(StructureError):
        htpot.make_abelian(2)


def test_abelian_kernel_exponent():
    spec = htpot.make_abelian(5)
    params = htpot.params_for(spec)
    p = htpot.Point.of([2.0, 0.0, 0.0, 0.0, 0.0])
    assert htpot.gamma(params, spec, p) == pytest.approx(2.0 ** (2 - 5), rel=1e-14)


def test_compose_orientation_pinned(h1):
    # Hand-evaluated: A (1,0) = (0,-1), inner product with (0,1) is -1, so t = -1/2.
    out = htpot.compose(h1, htpot.Point.of([1, 0], [0]), htpot.Point.of([0, 1], [0]))
    assert np.array_equal(out.x, [1.0, 1.0])
    assert out.t[0] == -0.5


def test_compose_identity_and_mismatch(h1):
    p = htpot.Point.of([0.3, -1.2], [0.7])
    e = htpot.origin(h1)
    out = htpot.compose(h1, p, e)
    assert np.array_equal(out.x, p.x) and np.array_equal(out.t, p.t)
    with pytest.raises(StructureError):
        htpot.compose(h1, p, htpot.Point.of([1.0, 2.0, 3.0]))


def test_inverse_examples(h1):
    p = htpot.Point.of([1, 2], [3])
    ip = htpot.inverse(h1, p)
    assert np.array_equal(ip.x, [-1.0, -2.0]) and ip.t[0] == -3.0
    assert htpot.inverse(h1, htpot.origin(h1)).x.tolist() == [0.0, 0.0]
    rng = np.random.default_rng(0)
    for p in random_points(rng, h1, 100, scale=5.0):
        back = htpot.compose(h1, p, htpot.inverse(h1, p))
        assert np.all(back.x == 0.0) and np.all(back.t == 0.0)


def test_dilate_examples(h1):
    out = htpot.dilate(h1, 2.0, htpot.Point.of([1, 0], [1]))
    assert np.array_equal(out.x, [2.0, 0.0]) and out.t[0] == 4.0
    p = htpot.Point.of([0.4, -0.7], [0.9])
    same = htpot.dilate(h1, 1.0, p)
    assert np.array_equal(same.x, p.x) and np.array_equal(same.t, p.t)
    with pytest.raises(StructureError):
        htpot.dilate(h1, 0.0, p)


def test_dilation_automorphism_random(all_groups):
    rng = np.random.default_rng(1)
    for spec in all_groups.values():
        for p, q in zip(random_points(rng, spec, 30, 10.0), random_points(rng, spec, 30, 10.0)):
            for lam in (0.5, 2.0, 10.0):
                lhs = htpot.dilate(spec, lam, htpot.compose(spec, p, q))
                rhs = htpot.compose(spec, htpot.dilate(spec, lam, p), htpot.dilate(spec, lam, q))
                scale = max(1.0, np.max(np.abs(lhs.x)), np.max(np.abs(lhs.t), initial=0.0))
                assert np.max(np.abs(lhs.x - rhs.x)) <= 1e-10 * scale
                if spec.n:
                    assert np.max(np.abs(lhs.t - rhs.t)) <= 1e-10 * scale


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(-10, 10), min_size=9, max_size=9).map(lambda v: np.asarray(v)),
)
def test_associativity_property(values):
    spec = htpot.make_heisenberg(1)
    p = htpot.Point(values[0:2], values[2:3])
    q = htpot.Point(values[3:5], values[5:6])
    r = htpot.Point(values[6:8], values[8:9])
    lhs = htpot.compose(spec, htpot.compose(spec, p, q), r)
    rhs = htpot.compose(spec, p, htpot.compose(spec, q, r))
    assert np.max(np.abs(lhs.x - rhs.x)) <= 1e-10
    assert np.max(np.abs(lhs.t - rhs.t)) <= 1e-10


def test_group_config_roundtrip(tmp_path, quaternionic):
    for cfg in (
        {"type": "heisenberg", "d": 2},
        {"type": "quaternionic"},
        {"type": "abelian", "m": 4},
        groups.group_to_config(quaternionic),
    ):
        spec = groups.group_from_config(cfg)
        assert htpot.validate_group(spec).passed
    path = tmp_path / "group.json"
    path.write_text(json.dumps({"type": "heisenberg", "d": 1}))
    assert groups.load_group(str(path)).m == 2
    with pytest.raises(StructureError):
        groups.group_from_config({"type": "octonionic"})
