"""Pairing of horizontal vector fields with the volume form on box faces.

A horizontal field sum(g_j X_j) corresponds to the Euclidean vector field

    V = (g_1, ..., g_m,  0.5 <A_1 x, g>, ..., 0.5 <A_n x, g>)

because X_j = e_{x_j} + 0.5 * sum_k (A_k x)_j e_{t_k}.  Contracting V with the
Lebesgue volume form and restricting to a coordinate face keeps exactly the
component of V normal to the face; with the outward (Stokes) orientation the
resulting surface integrand is ``outward_sign * V_normal * dsigma``.

``face_integrand`` evaluates that reduced form directly.  ``face_integrand_bruteforce``
builds the full interior product coefficient by coefficient and restricts it,
which exercises the reduction instead of assuming it.
"""

from __future__ import annotations

import numpy as np

from .geometry import Face
from .groups import GroupSpec

__all__ = ["horizontal_to_euclidean", "face_integrand", "face_integrand_bruteforce"]


def horizontal_to_euclidean(spec: GroupSpec, grad: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Euclidean components (dim m+n) of sum_j grad_j X_j at base x-part ``x``.

    ``grad`` has shape (..., m); the result has shape (..., m+n).
    """
    if spec.n == 0:
        return grad
    tcomp = 0.5 * np.einsum("kji,...i,...j->...k", spec.matrices, x, grad)
    return np.concatenate([grad, tcomp], axis=-1)


def face_integrand(spec: GroupSpec, grad: np.ndarray, x: np.ndarray, face: Face) -> np.ndarray:
    """Outward surface-flux integrand of sum_j grad_j X_j on a box face.

    On an x-face only X_normal survives; on a t-face the integrand is
    0.5 <A_k x, grad>.  Both carry the outward orientation sign.
    """
    if face.coord == "x":
        value = grad[..., face.index]
    else:
        a = spec.matrices[face.index]
        value = 0.5 * np.einsum("ji,...i,...j->...", a, x, grad)
    return face.outward * value


def face_integrand_bruteforce(spec: GroupSpec, grad: np.ndarray, x: np.ndarray, face: Face) -> np.ndarray:
    """Same integrand via the generic interior-product/restriction computation.

    For each coordinate q, the contraction of a Euclidean field V with the
    volume form has coefficient (-1)^q V_q on the basis form omitting dq.
    Restriction to the face kills every basis form except the one omitting the
    fixed coordinate, and the Stokes orientation of the face contributes
    outward * (-1)^q, leaving outward * V_q.
    """
    v = horizontal_to_euclidean(spec, grad, x)
    fixed = face.index if face.coord == "x" else spec.m + face.index
    total = np.zeros(v.shape[:-1])
    for q in range(spec.m + spec.n):
        coeff = ((-1.0) ** q) * v[..., q]
        survives = 1.0 if q == fixed else 0.0
        orientation = face.outward * ((-1.0) ** q)
        total = total + orientation * survives * coeff
    return total
