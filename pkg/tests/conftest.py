"""Shared fixtures and oracle helpers for the test suite."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pytest

import htpot
from htpot import dirichlet, fundamental, operators
from htpot.geometry import Box

NEWTON_C3 = 1.0 / (4.0 * math.pi)  # calibrated constant of the m=3 Newtonian kernel


@pytest.fixture(scope="session")
def h1():
    return htpot.make_heisenberg(1)


@pytest.fixture(scope="session")
def h2():
    return htpot.make_heisenberg(2)


@pytest.fixture(scope="session")
def quaternionic():
    return htpot.make_quaternionic()


@pytest.fixture(scope="session")
def abelian3():
    return htpot.make_abelian(3)


@pytest.fixture(scope="session")
def all_groups(h1, h2, quaternionic, abelian3):
    return {"heisenberg_1": h1, "heisenberg_2": h2, "quaternionic": quaternionic, "abelian_3": abelian3}


def random_points(rng, spec, count, scale=2.0):
    xs = rng.uniform(-scale, scale, size=(count, spec.m))
    ts = rng.uniform(-scale, scale, size=(count, spec.n))
    return [htpot.Point(x, t) for x, t in zip(xs, ts)]


def gamma_field(params, spec, pole):
    """Gamma with the given pole as a batch-evaluable scalar field."""

    def many(x, t):
        dx, tt = fundamental.pole_shift(spec, x, t, pole.x, pole.t)
        return fundamental.gamma_from_fourth(params, fundamental.gauge_fourth(spec, dx, tt))

    return operators.ScalarField(
        eval=lambda p: float(many(p.x[None, :], p.t[None, :])[0]),
        label="gamma_pole",
        eval_many=many,
    )


def green_field(params, spec, domain, pole, truncation):
    """A fixed-truncation image candidate as a batch-evaluable scalar field."""
    from htpot import images

    def many(x, t):
        return images.green_eval_grid(params, spec, domain, x, t, pole, truncation)

    return operators.ScalarField(
        eval=lambda p: float(many(p.x[None, :], p.t[None, :])[0]),
        label="green_candidate",
        eval_many=many,
    )


def shell_points(rng, spec, pole, count, lo=0.6, hi=1.4, scale=2.0, domain=None, margin=0.25):
    """Points at gauge distance in [lo, hi] from the pole, optionally inside a domain."""
    from htpot import images

    params = htpot.params_for(spec)
    pts = []
    tries = 0
    while len(pts) < count:
        tries += 1
        if tries > 200000:
            raise RuntimeError("shell sampling failed")
        x = rng.uniform(-scale, scale, spec.m)
        if domain is not None:
            if isinstance(domain, htpot.Strip):
                x[domain.index - 1] = rng.uniform(margin, domain.width - margin)
            else:
                for k, a in zip(domain.indices, domain.offsets):
                    x[k - 1] = a + rng.uniform(margin, scale)
        cand = htpot.Point(x, rng.uniform(-scale, scale, spec.n))
        shifted = htpot.compose(spec, htpot.inverse(spec, pole), cand)
        d = htpot.gauge(spec, shifted).value
        if lo <= d <= hi:
            pts.append(cand)
    return pts


@dataclass
class ManufacturedProblem:
    """An abelian manufactured Dirichlet problem with its exact solution."""

    spec: object
    params: object
    problem: dirichlet.ProblemSpec
    ustar: operators.ScalarField
    f: operators.ScalarField
    eval_points: list
    quad: dirichlet.QuadratureSpec


def _bump_fields(beta, sigma, amplitude, centre):
    """u* = (beta + x_1) * A exp(-|x-c|^2/sigma^2) and f = Laplace u* (m = 3)."""

    centre = np.asarray(centre, dtype=float)

    def g_many(x):
        return amplitude * np.exp(-np.sum((x - centre) ** 2, axis=-1) / sigma**2)

    def ustar_many(x, t):
        return (beta + x[:, 0]) * g_many(x)

    def f_many(x, t):
        d2 = np.sum((x - centre) ** 2, axis=-1)
        return (
            -(4.0 / sigma**2) * (x[:, 0] - centre[0])
            + (beta + x[:, 0]) * (-6.0 / sigma**2 + 4.0 * d2 / sigma**4)
        ) * g_many(x)

    ustar = operators.ScalarField(
        lambda p: float(ustar_many(p.x[None], p.t[None])[0]), "u*", ustar_many
    )
    f = operators.ScalarField(lambda p: float(f_many(p.x[None], p.t[None])[0]), "laplace_u*", f_many)
    return ustar, f


def halfspace_manufactured(abelian3, fine=True):
    """Documented default configuration for the abelian half-space problem."""
    params = htpot.params_for(abelian3, NEWTON_C3)
    beta, sigma, amplitude = 0.3, 0.6, 1.0
    centre = [0.8, 0.0, 0.0]
    ustar, f = _bump_fields(beta, sigma, amplitude, centre)
    half = 4.5 * sigma
    fbox = Box(np.array([[0.0, centre[0] + half], [-half, half], [-half, half]]), np.zeros((0, 2)))
    phibox = Box(np.array([[-1.0, 1.0], [-half, half], [-half, half]]), np.zeros((0, 2)))
    problem = dirichlet.ProblemSpec(
        htpot.half_space(),
        dirichlet.SupportedField(f, fbox),
        [dirichlet.FaceDatum(1, 0.0, -1, ustar, phibox)],
    )
    pts = [
        htpot.Point.of([a, b, c])
        for a in np.linspace(0.3, 1.9, 5)
        for b in np.linspace(-0.6, 0.6, 5)
        for c in np.linspace(-0.5, 0.5, 5)
    ]
    quad = (
        dirichlet.QuadratureSpec((180, 250, 250), 96, "midpoint", image_volume_nodes=(60, 84, 84))
        if fine
        else dirichlet.QuadratureSpec((64, 88, 88), 48, "midpoint", image_volume_nodes=(24, 32, 32))
    )
    return ManufacturedProblem(abelian3, params, problem, ustar, f, pts, quad)


def strip_manufactured(abelian3, fine=True):
    """Documented default configuration for the abelian strip problem."""
    params = htpot.params_for(abelian3, NEWTON_C3)
    beta, sigma, amplitude = 0.2, 0.35, 1.0
    centre = [0.5, 0.0, 0.0]
    ustar, f = _bump_fields(beta, sigma, amplitude, centre)
    half = 4.5 * sigma
    fbox = Box(np.array([[0.0, 1.0], [-half, half], [-half, half]]), np.zeros((0, 2)))
    phibox = Box(np.array([[-1.0, 2.0], [-half, half], [-half, half]]), np.zeros((0, 2)))
    problem = dirichlet.ProblemSpec(
        htpot.Strip(1, 1.0),
        dirichlet.SupportedField(f, fbox),
        [
            dirichlet.FaceDatum(1, 0.0, -1, ustar, phibox),
            dirichlet.FaceDatum(1, 1.0, +1, ustar, phibox),
        ],
    )
    pts = [
        htpot.Point.of([a, b, c]) for a in (0.25, 0.5, 0.75) for b in (-0.3, 0.2) for c in (0.0, 0.4)
    ]
    quad = (
        dirichlet.QuadratureSpec((96, 196, 196), 96, "midpoint", image_volume_nodes=(32, 56, 56))
        if fine
        else dirichlet.QuadratureSpec((48, 96, 96), 48, "midpoint", image_volume_nodes=(20, 36, 36))
    )
    return ManufacturedProblem(abelian3, params, problem, ustar, f, pts, quad)
