"""Fold-region analysis: conserved quantity, singular canard, critical values,
and a shooting oracle for the canard splitting.

In the fold-region chart with epsilon = 0 and Zb = 0 the first two equations
decouple into an integrable planar system with constant of motion

    H(Xb, Yb) = 1/2 exp(-2 sqrt(3) Yb) (-Xb^2 + Yb/sqrt(3) + 1/6).

The H = 0 parabola is the singular canard separating closed orbits from open
level curves.  For small epsilon (and frozen Pb, Zb, valid for small omega)
the attracting and repelling slow-manifold branches split; the signed
splitting vanishes at the canard-critical value

    Zb_cr = -sqrt(3) (1 + 2 k1) / 24 * sqrt(epsilon).

The shooting oracle below measures the splitting on the section {Xb = 0} and
brackets the zero, providing an independent numeric check of that value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import BracketError, NoCrossingError
from .integrate import EventSpec, IntegratorConfig, integrate
from .models import FOLD_RIGHT, SQRT3, ParameterSet

#: Default seed distance |Xb| for the shooting oracle.
SEED_DISTANCE = 10.0

#: The oracle is validated for epsilon in this closed interval.
EPSILON_RANGE = (1e-5, 1e-2)

_ORACLE_CONFIG = IntegratorConfig(rtol=1e-11, atol=1e-13)


def hamiltonian(xb, yb):
    """Constant of motion of the integrable fold-region limit."""
    xb = np.asarray(xb, dtype=float)
    yb = np.asarray(yb, dtype=float)
    return 0.5 * np.exp(-2.0 * SQRT3 * yb) * (-xb * xb + yb / SQRT3 + 1.0 / 6.0)


def hamiltonian_gradient(xb, yb):
    """(dH/dXb, dH/dYb); the integrable field is orthogonal to it."""
    xb = np.asarray(xb, dtype=float)
    yb = np.asarray(yb, dtype=float)
    w = np.exp(-2.0 * SQRT3 * yb)
    return (-xb * w, w * (SQRT3 * xb * xb - yb))


def singular_canard(t):
    """The H = 0 parabola (t/(2 sqrt 3), t^2/(4 sqrt 3) - 1/(2 sqrt 3))."""
    t = np.asarray(t, dtype=float)
    return (t / (2.0 * SQRT3), t * t / (4.0 * SQRT3) - 1.0 / (2.0 * SQRT3))


def z_critical_values(k1: float, epsilon: float) -> tuple[float, float]:
    """Canard-critical values (Zb_cr, Z_cr); Z_cr = sqrt(epsilon) * Zb_cr.

    Z_cr is evaluated directly from epsilon so it is exactly linear in it.
    """
    coeff = -SQRT3 * (1.0 + 2.0 * k1) / 24.0
    return coeff * math.sqrt(epsilon), coeff * epsilon


def z_critical(params: ParameterSet) -> tuple[float, float]:
    return z_critical_values(params.k1, params.epsilon)


def p_critical(params: ParameterSet) -> tuple[float, float] | None:
    """The two canard P-values +-sqrt(B1^2 - (Z_cr - mu)^2), or None when the
    critical Z lies outside the forcing domain (no canard in domain)."""
    _, z_cr = z_critical(params)
    disc = params.b1**2 - (z_cr - params.mu) ** 2
    if disc < 0.0:
        return None
    p = math.sqrt(disc)
    return (p, -p)


def frozen_planar_rhs(t, xy, k1: float, epsilon: float, z_bar: float) -> np.ndarray:
    """Fold-region planar system with Pb, Zb frozen; epsilon >= 0 allowed."""
    xb, yb = xy
    se = math.sqrt(epsilon)
    return np.array(
        [-yb + SQRT3 * xb * xb - se * xb**3, xb - k1 * se * yb + z_bar]
    )


def frozen_planar_jac(t, xy, k1: float, epsilon: float, z_bar: float) -> np.ndarray:
    xb = xy[0]
    se = math.sqrt(epsilon)
    return np.array(
        [[2.0 * SQRT3 * xb - 3.0 * se * xb * xb, -1.0], [1.0, -k1 * se]]
    )


@dataclass(frozen=True)
class CanardResult:
    """Analytic vs numeric canard-critical Zb for one epsilon."""

    k1: float
    epsilon: float
    z_bar_cr_analytic: float
    z_bar_cr_numeric: float
    samples: tuple[tuple[float, float], ...]  # (Zb, splitting) pairs, Zb-sorted

    @property
    def ratio(self) -> float:
        return self.z_bar_cr_numeric / self.z_bar_cr_analytic

    @property
    def coefficient_numeric(self) -> float:
        """Numeric Zb_cr normalized by sqrt(epsilon)."""
        return self.z_bar_cr_numeric / math.sqrt(self.epsilon)


def _seed(x_seed: float, k1: float, epsilon: float, z_bar: float) -> np.ndarray:
    """Point on the slow-manifold branch over Xb = x_seed, first-order corrected."""
    se = math.sqrt(epsilon)
    phi = SQRT3 * x_seed**2 - se * x_seed**3
    dphi = 2.0 * SQRT3 * x_seed - 3.0 * se * x_seed**2
    return np.array([x_seed, phi - (x_seed - k1 * se * phi + z_bar) / dphi])


def splitting_distance(
    z_bar: float,
    k1: float,
    epsilon: float,
    seed_distance: float = SEED_DISTANCE,
    config: IntegratorConfig | None = None,
) -> float:
    """Signed Yb gap on {Xb = 0} between the attracting branch continued
    forward and the repelling branch continued backward.

    Positive values put the attracting branch above the repelling one (the
    trajectory turns back into small oscillations); the sign flips at the
    canard connection.
    """
    cfg = config or _ORACLE_CONFIG
    # keep the repelling seed clear of the second fold of the full manifold
    L = min(seed_distance, 0.7 * FOLD_RIGHT / math.sqrt(epsilon)) if epsilon > 0 else seed_distance
    t_max = 4.0 * SQRT3 * L + 50.0

    fwd = lambda t, y: frozen_planar_rhs(t, y, k1, epsilon, z_bar)
    fwd_jac = lambda t, y: frozen_planar_jac(t, y, k1, epsilon, z_bar)
    hit = EventSpec(lambda t, y: y[0], kind="section-crossing", direction=+1, count=1)
    traj = integrate(fwd, _seed(-L, k1, epsilon, z_bar), (0.0, t_max), cfg,
                     events=[hit], jac=fwd_jac, dense=False)
    if not traj.events:
        raise NoCrossingError(f"attracting branch never reached Xb=0 (Zb={z_bar:.3g})")
    y_att = traj.events[0].state[1]

    bwd = lambda t, y: -frozen_planar_rhs(t, y, k1, epsilon, z_bar)
    bwd_jac = lambda t, y: -frozen_planar_jac(t, y, k1, epsilon, z_bar)
    hit = EventSpec(lambda t, y: y[0], kind="section-crossing", direction=-1, count=1)
    traj = integrate(bwd, _seed(+L, k1, epsilon, z_bar), (0.0, t_max), cfg,
                     events=[hit], jac=bwd_jac, dense=False)
    if not traj.events:
        raise NoCrossingError(f"repelling branch never reached Xb=0 (Zb={z_bar:.3g})")
    y_rep = traj.events[0].state[1]
    return float(y_att - y_rep)


def numeric_canard_split(
    k1,
    epsilon: float,
    seed_distance: float = SEED_DISTANCE,
    bracket: tuple[float, float] = (3.0, 0.2),
    config: IntegratorConfig | None = None,
) -> CanardResult:
    """Locate the splitting zero by bracketing and compare with the analytic value.

    ``k1`` may be a bare damping value or a :class:`ParameterSet`.  The
    bracket is given as multiples of the analytic Zb_cr; if the splitting
    does not change sign there a wider scan is attempted before raising
    :class:`BracketError`.
    """
    if isinstance(k1, ParameterSet):
        k1 = k1.k1
    lo, hi = EPSILON_RANGE
    if not (lo <= epsilon <= hi):
        raise ValueError(f"oracle validated for epsilon in [{lo:g}, {hi:g}]")

    zb_ana, _ = z_critical_values(k1, epsilon)
    samples: list[tuple[float, float]] = []

    def split(zb: float) -> float:
        s = splitting_distance(zb, k1, epsilon, seed_distance, config)
        samples.append((zb, s))
        return s

    a, b = bracket[0] * zb_ana, bracket[1] * zb_ana
    fa, fb = split(a), split(b)
    if fa * fb > 0.0:
        grid = np.linspace(6.0 * zb_ana, -zb_ana, 15)
        vals = [split(z) for z in grid]
        ok = [
            (grid[i], grid[i + 1])
            for i in range(len(grid) - 1)
            if vals[i] * vals[i + 1] < 0.0
        ]
        if not ok:
            raise BracketError(
                f"no sign change of the splitting for Zb in [{grid[0]:.3g}, {grid[-1]:.3g}]"
            )
        a, b = ok[0]
    zb_num = brentq(split, a, b, xtol=abs(zb_ana) * 1e-6 + 1e-14)
    return CanardResult(
        k1=k1,
        epsilon=epsilon,
        z_bar_cr_analytic=zb_ana,
        z_bar_cr_numeric=float(zb_num),
        samples=tuple(sorted(samples)),
    )


def canard_convergence(k1, epsilons, **kwargs) -> list[CanardResult]:
    """Run the splitting oracle over several epsilon values."""
    return [numeric_canard_split(k1, float(e), **kwargs) for e in epsilons]
