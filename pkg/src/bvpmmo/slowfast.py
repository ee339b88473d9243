"""Desingularized slow flow on the critical manifold and folded equilibria.

Projecting the standard-form system onto Y = f(X) and rescaling time by
f'(X) gives the desingularized flow

    X' = X - k1 f(X) + Z
    P' = omega f'(X) (mu - Z)
    Z' = omega f'(X) P

which reverses the physical time direction on the attracting sheets
(f'(X) < 0).  Its equilibria on the fold lines are the foldedsingularities;
their nonzero eigenvalues are 1/2 +- 1/2 sqrt(1 + 4 omega f''(X_fold) P0),
with P0 the equilibrium's P-coordinate, and the remaining zero eigenvalue
points along P.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidPointError
from .models import (
    FOLD_LEFT,
    FOLD_RIGHT,
    ParameterSet,
    slow_manifold_d2f,
    slow_manifold_df,
    slow_manifold_f,
)

#: Residual tolerance below which a point counts as a folded equilibrium.
STATIONARY_TOL = 1e-9

#: Magnitude below which a nonzero eigenvalue is treated as a second zero.
ZERO_EIG_TOL = 1e-10

FOLDED_NODE = "folded-node"
FOLDED_SADDLE = "folded-saddle"
FOLDED_SADDLE_NODE = "folded-saddle-node"
FOLDED_FOCUS = "folded-focus"
NONE_IN_DOMAIN = "none-in-domain"


@dataclass(frozen=True)
class FoldedEquilibrium:
    """Folded singularity: location on a fold, eigenvalues, classification.

    ``eigenvalues`` lists the exact zero (P-direction) first.  The
    classification uses the two remaining eigenvalues, i.e. the node/saddle
    character of the flow in the (X, Z) directions.
    """

    location: tuple[float, float, float]
    branch: str  # 'left' (X = 0) or 'right' (X = 2 sqrt(3)/3)
    eigenvalues: tuple[complex, complex, complex]
    classification: str


def desingularized_rhs(state, params: ParameterSet) -> np.ndarray:
    """Desingularized slow flow on (X, P, Z); time reversed where f'(X) < 0."""
    X, P, Z = state
    df = slow_manifold_df(X)
    return np.array(
        [
            X - params.k1 * slow_manifold_f(X) + Z,
            params.omega * df * (params.mu - Z),
            params.omega * df * P,
        ]
    )


def desingularized_jacobian(state, params: ParameterSet) -> np.ndarray:
    X, P, Z = state
    df = slow_manifold_df(X)
    d2f = slow_manifold_d2f(X)
    om = params.omega
    return np.array(
        [
            [1.0 - params.k1 * df, 0.0, 1.0],
            [om * d2f * (params.mu - Z), 0.0, -om * df],
            [om * d2f * P, om * df, 0.0],
        ]
    )


def _fold_eigenvalues(x_fold: float, p0: float, params: ParameterSet):
    """Analytic eigenvalues (0, 1/2 +- 1/2 sqrt(r)) with r = 1 + 4 w f''(X) P0."""
    radicand = 1.0 + 4.0 * params.omega * float(slow_manifold_d2f(x_fold)) * p0
    root = cmath.sqrt(radicand)
    lam_plus = 0.5 + 0.5 * root
    lam_minus = 0.5 - 0.5 * root
    if radicand >= 0.0:
        lam_plus, lam_minus = complex(lam_plus.real), complex(lam_minus.real)
    return (0.0 + 0.0j, lam_plus, lam_minus)


def _classify_from_eigenvalues(eigs) -> str:
    lam1, lam2 = eigs[1], eigs[2]
    if abs(lam1.imag) > 0.0 or abs(lam2.imag) > 0.0:
        return FOLDED_FOCUS
    a, b = lam1.real, lam2.real
    if min(abs(a), abs(b)) < ZERO_EIG_TOL:
        return FOLDED_SADDLE_NODE
    return FOLDED_NODE if a * b > 0.0 else FOLDED_SADDLE


def _make_equilibrium(x_fold, p0, z0, branch, params) -> FoldedEquilibrium:
    eigs = _fold_eigenvalues(x_fold, p0, params)
    return FoldedEquilibrium(
        location=(float(x_fold), float(p0), float(z0)),
        branch=branch,
        eigenvalues=eigs,
        classification=_classify_from_eigenvalues(eigs),
    )


def folded_equilibria(params: ParameterSet) -> list[FoldedEquilibrium]:
    """All folded equilibria inside the forcing domain, node listed first.

    On the left fold (X = 0) stationarity forces Z = 0, which lies on the
    forcing circle only for |mu| <= B1: two points (0, +-sqrt(B1^2 - mu^2), 0),
    merging into a folded saddle-node at the origin when |mu| = B1 and
    leaving the domain for |mu| > B1 (empty list: none in domain).  The
    right-fold candidate is returned only when its Z lies in
    [mu - B1, mu + B1]; for k1 in (0, 1) with B1 and mu small it does not.
    """
    out: list[FoldedEquilibrium] = []
    disc = params.b1**2 - params.mu**2
    if abs(disc) <= 1e-15 * max(params.b1**2, 1.0):
        disc = 0.0
    if disc == 0.0:
        out.append(_make_equilibrium(FOLD_LEFT, 0.0, 0.0, "left", params))
    elif disc > 0.0:
        p0 = math.sqrt(disc)
        # node (P < 0) first, saddle (P > 0) second
        out.append(_make_equilibrium(FOLD_LEFT, -p0, 0.0, "left", params))
        out.append(_make_equilibrium(FOLD_LEFT, +p0, 0.0, "left", params))

    z_right = -FOLD_RIGHT + params.k1 * float(slow_manifold_f(FOLD_RIGHT))
    disc_r = params.b1**2 - (z_right - params.mu) ** 2
    if disc_r >= 0.0:
        p0 = math.sqrt(disc_r)
        out.append(_make_equilibrium(FOLD_RIGHT, -p0, z_right, "right", params))
        if p0 > 0.0:
            out.append(_make_equilibrium(FOLD_RIGHT, +p0, z_right, "right", params))
    return out


def folded_eigenvalues(point, params: ParameterSet):
    """Analytic eigenvalues at a folded equilibrium; zero entry first.

    Raises :class:`InvalidPointError` when the point is not stationary for
    the desingularized flow or does not sit on a fold.
    """
    X, P, Z = point
    residual = float(np.linalg.norm(desingularized_rhs(point, params)))
    if residual > STATIONARY_TOL or abs(float(slow_manifold_df(X))) > STATIONARY_TOL:
        raise InvalidPointError(
            f"point {tuple(point)} is not a folded equilibrium (residual {residual:.3g})"
        )
    return _fold_eigenvalues(X, P, params)


def classify(point, params: ParameterSet) -> str:
    """Classification of a folded equilibrium from its nonzero eigenvalue pair."""
    return _classify_from_eigenvalues(folded_eigenvalues(point, params))
