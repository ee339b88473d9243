"""Vector fields, coordinate charts, and slow-manifold geometry.

Five related systems are defined here:

* the planar forced oscillator (``rhs_forced``),
* its 4D autonomous embedding via p = cos(omega t), z = sin(omega t)
  (``rhs_autonomous``),
* the standard form with the fold moved to the origin (``rhs_standard``),
* the fold-region rescaling of the standard form (``rhs_rescaled``),
* two reference three-variable models (``rhs_prototype``,
  ``rhs_generalized``).

All right-hand sides are pure functions of ``(t, state, params)`` and are
safe to share between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import TransformUndefinedError

SQRT3 = math.sqrt(3.0)

#: Standard-chart fold abscissas: f'(X) = 0 at X = 0 and X = 2*sqrt(3)/3.
FOLD_LEFT = 0.0
FOLD_RIGHT = 2.0 * SQRT3 / 3.0

#: Tolerance for circle invariants checked at state construction.
CIRCLE_TOL = 1e-6


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class ParameterSet:
    """Model parameters epsilon, omega, k1, b0, b1.

    The unfolding parameter ``mu`` is derived and always consistent:
    mu = b0 - sqrt(3)*(3 - 2*k1)/9.  Instances are immutable; use
    :meth:`with_updates` to derive modified copies.
    """

    epsilon: float
    omega: float
    k1: float
    b0: float
    b1: float = 0.0

    def __post_init__(self):
        _require(self.epsilon > 0.0, "epsilon must be positive")
        _require(self.omega > 0.0, "omega must be positive")
        _require(0.0 <= self.k1 <= 1.0, "k1 must lie in [0, 1]")
        _require(self.b1 >= 0.0, "b1 must be nonnegative")

    @property
    def mu(self) -> float:
        return self.b0 - SQRT3 * (3.0 - 2.0 * self.k1) / 9.0

    def with_updates(self, **changes) -> "ParameterSet":
        return replace(self, **changes)


def b0_for_mu(mu: float, k1: float) -> float:
    """Bias value that realizes a prescribed unfolding parameter mu."""
    return mu + SQRT3 * (3.0 - 2.0 * k1) / 9.0


@dataclass(frozen=True)
class PrototypeParams:
    """Parameters of the reference three-variable models.

    ``f2, f3, g1, mu`` parametrize the three-scale prototype; ``k3``
    (with ``k1``, ``b0``) is used by the generalized autonomous variant.
    """

    f2: float = 0.0
    f3: float = 0.0
    g1: float = 0.0
    mu: float = 0.0
    epsilon: float = 1.0
    k3: float = 0.0
    k1: float = 0.0
    b0: float = 0.0

    def __post_init__(self):
        _require(self.epsilon > 0.0, "epsilon must be positive")


@dataclass(frozen=True)
class StateOriginal:
    """Point in the original embedding chart (x, y, p, z) with p^2 + z^2 = 1."""

    x: float
    y: float
    p: float
    z: float

    def __post_init__(self):
        _require(
            abs(self.p**2 + self.z**2 - 1.0) <= CIRCLE_TOL,
            "p^2 + z^2 must equal 1 at construction",
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.p, self.z], dtype=float)


@dataclass(frozen=True)
class StateStandard:
    """Point in the standard chart (X, Y, P, Z) with (Z - mu)^2 + P^2 = B1^2."""

    X: float
    Y: float
    P: float
    Z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.X, self.Y, self.P, self.Z], dtype=float)

    def validate(self, params: ParameterSet, tol: float = CIRCLE_TOL) -> "StateStandard":
        r2 = (self.Z - params.mu) ** 2 + self.P**2
        _require(abs(r2 - params.b1**2) <= tol, "(Z-mu)^2 + P^2 must equal B1^2")
        lo, hi = params.mu - params.b1, params.mu + params.b1
        _require(lo - tol <= self.Z <= hi + tol, "Z outside [mu-B1, mu+B1]")
        return self


@dataclass(frozen=True)
class StateRescaled:
    """Point in the fold-region chart; related to the standard chart by
    X = sqrt(eps)*Xb, Y = eps*Yb, P = sqrt(eps)*Pb, Z = sqrt(eps)*Zb."""

    Xb: float
    Yb: float
    Pb: float
    Zb: float

    def as_array(self) -> np.ndarray:
        return np.array([self.Xb, self.Yb, self.Pb, self.Zb], dtype=float)


# ---------------------------------------------------------------------------
# Right-hand sides


def rhs_forced(t, xy, params: ParameterSet) -> np.ndarray:
    """Planar forced field: (eps^-1 (y + x - x^3), -x - k1 y + B0 + B1 sin(omega t))."""
    x, y = xy
    return np.array(
        [
            (y + x - x**3) / params.epsilon,
            -x - params.k1 * y + params.b0 + params.b1 * math.sin(params.omega * t),
        ]
    )


def jac_forced(t, xy, params: ParameterSet) -> np.ndarray:
    x = xy[0]
    return np.array(
        [[(1.0 - 3.0 * x * x) / params.epsilon, 1.0 / params.epsilon], [-1.0, -params.k1]]
    )


def rhs_autonomous(t, state, params: ParameterSet) -> np.ndarray:
    """Autonomous embedding: the forcing phase rides on the circle (p, z)."""
    x, y, p, z = state
    return np.array(
        [
            (y + x - x**3) / params.epsilon,
            -x - params.k1 * y + params.b0 + params.b1 * z,
            -params.omega * z,
            params.omega * p,
        ]
    )


def jac_autonomous(t, state, params: ParameterSet) -> np.ndarray:
    x = state[0]
    e = params.epsilon
    return np.array(
        [
            [(1.0 - 3.0 * x * x) / e, 1.0 / e, 0.0, 0.0],
            [-1.0, -params.k1, 0.0, params.b1],
            [0.0, 0.0, 0.0, -params.omega],
            [0.0, 0.0, params.omega, 0.0],
        ]
    )


def rhs_standard(t, state, params: ParameterSet) -> np.ndarray:
    """Standard form: fold at the origin, forcing circle centered at Z = mu."""
    X, Y, P, Z = state
    return np.array(
        [
            (-Y + SQRT3 * X * X - X**3) / params.epsilon,
            X - params.k1 * Y + Z,
            params.omega * (params.mu - Z),
            params.omega * P,
        ]
    )


def jac_standard(t, state, params: ParameterSet) -> np.ndarray:
    X = state[0]
    e = params.epsilon
    return np.array(
        [
            [(2.0 * SQRT3 * X - 3.0 * X * X) / e, -1.0 / e, 0.0, 0.0],
            [1.0, -params.k1, 0.0, 1.0],
            [0.0, 0.0, 0.0, -params.omega],
            [0.0, 0.0, params.omega, 0.0],
        ]
    )


def rescaled_field(t, state, k1, epsilon, omega, mu_bar) -> np.ndarray:
    """Fold-region field with explicit scalar parameters; epsilon >= 0 allowed.

    The singular limit epsilon = 0 freezes Zb and reduces the first two
    components to the integrable pair (-Yb + sqrt(3) Xb^2, Xb + Zb).
    """
    xb, yb, pb, zb = state
    se = math.sqrt(epsilon)
    return np.array(
        [
            -yb + SQRT3 * xb * xb - se * xb**3,
            xb - k1 * se * yb + zb,
            omega * (mu_bar - se * zb),
            omega * se * pb,
        ]
    )


def rhs_rescaled(t, state, params: ParameterSet, mu_bar: float | None = None) -> np.ndarray:
    """Fold-region rescaled field in the barred variables.

    ``mu_bar`` defaults to the family-chart convention mu/sqrt(epsilon),
    which treats the unfolding parameter as an O(1) quantity while epsilon
    shrinks.  With ``mu_bar = params.mu`` (unscaled) the field is the exact
    pullback of ``rhs_standard`` under the chart scaling with time divided
    by sqrt(epsilon).
    """
    if mu_bar is None:
        mu_bar = params.mu / math.sqrt(params.epsilon)
    return rescaled_field(t, state, params.k1, params.epsilon, params.omega, mu_bar)


def jac_rescaled(t, state, params: ParameterSet, mu_bar: float | None = None) -> np.ndarray:
    xb = state[0]
    se = math.sqrt(params.epsilon)
    return np.array(
        [
            [2.0 * SQRT3 * xb - 3.0 * se * xb * xb, -1.0, 0.0, 0.0],
            [1.0, -params.k1 * se, 0.0, 1.0],
            [0.0, 0.0, 0.0, -params.omega * se],
            [0.0, 0.0, params.omega * se, 0.0],
        ]
    )


def rhs_prototype(t, state, p: PrototypeParams) -> np.ndarray:
    """Three-scale prototype: (eps^-1 (-z + f2 v^2 + f3 v^3), v - w, eps (mu - g1 z))."""
    v, z, w = state
    return np.array(
        [
            (-z + p.f2 * v * v + p.f3 * v**3) / p.epsilon,
            v - w,
            p.epsilon * (p.mu - p.g1 * z),
        ]
    )


def rhs_generalized(t, state, p: PrototypeParams) -> np.ndarray:
    """Generalized autonomous variant with slow bias feedback through k3."""
    x, y, z = state
    return np.array(
        [
            (x * (1.0 - x * x) + y + z) / p.epsilon,
            -x - p.k1 * y + p.b0,
            p.k3 * (-x - p.k1 * z + p.b0),
        ]
    )


# ---------------------------------------------------------------------------
# Slow manifold


def slow_manifold_f(X):
    """Critical-manifold graph Y = f(X) = sqrt(3) X^2 - X^3 in the standard chart."""
    X = np.asarray(X, dtype=float)
    return SQRT3 * X * X - X**3


def slow_manifold_df(X):
    """f'(X) = 2 sqrt(3) X - 3 X^2; zero exactly on the folds."""
    X = np.asarray(X, dtype=float)
    return 2.0 * SQRT3 * X - 3.0 * X * X


def slow_manifold_d2f(X):
    X = np.asarray(X, dtype=float)
    return 2.0 * SQRT3 - 6.0 * X


def fold_points() -> tuple[float, float]:
    """Standard-chart fold abscissas (0, 2*sqrt(3)/3)."""
    return (FOLD_LEFT, FOLD_RIGHT)


def slow_manifold_y_original(x):
    """Critical manifold y = x^3 - x in the original chart; folds at x = ±sqrt(3)/3."""
    x = np.asarray(x, dtype=float)
    return x**3 - x


def fold_points_original() -> tuple[float, float]:
    return (-SQRT3 / 3.0, SQRT3 / 3.0)


# ---------------------------------------------------------------------------
# Chart transforms


def map_original_to_standard(y, params: ParameterSet) -> np.ndarray:
    """Array transform (..., 4) original -> standard; requires B1 > 0."""
    if params.b1 == 0.0:
        raise TransformUndefinedError("standard chart needs B1 > 0 (P, Z scale by B1)")
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    out[..., 0] = -y[..., 0] + SQRT3 / 3.0
    out[..., 1] = y[..., 1] + 2.0 * SQRT3 / 9.0
    out[..., 2] = params.b1 * y[..., 2]
    out[..., 3] = params.b1 * y[..., 3] + params.mu
    return out


def map_standard_to_original(y, params: ParameterSet) -> np.ndarray:
    """Array transform (..., 4) standard -> original; requires B1 > 0."""
    if params.b1 == 0.0:
        raise TransformUndefinedError("standard chart needs B1 > 0 (P, Z scale by B1)")
    y = np.asarray(y, dtype=float)
    out = np.empty_like(y)
    out[..., 0] = -y[..., 0] + SQRT3 / 3.0
    out[..., 1] = y[..., 1] - 2.0 * SQRT3 / 9.0
    out[..., 2] = y[..., 2] / params.b1
    out[..., 3] = (y[..., 3] - params.mu) / params.b1
    return out


def to_standard(s: StateOriginal, params: ParameterSet) -> StateStandard:
    """Move the right fold to the origin: X = -x + sqrt(3)/3, Y = y + 2 sqrt(3)/9,
    P = B1 p, Z = B1 z + mu.  Round-trips with :func:`from_standard` to machine
    precision."""
    arr = map_original_to_standard(s.as_array(), params)
    return StateStandard(*arr).validate(params)


def from_standard(s: StateStandard, params: ParameterSet) -> StateOriginal:
    arr = map_standard_to_original(s.as_array(), params)
    return StateOriginal(*arr)


def map_standard_to_rescaled(y, params: ParameterSet) -> np.ndarray:
    """Array transform (..., 4): Xb = X/sqrt(eps), Yb = Y/eps, Pb = P/sqrt(eps),
    Zb = Z/sqrt(eps).  Time in the rescaled chart runs faster by 1/sqrt(eps)."""
    y = np.asarray(y, dtype=float)
    se = math.sqrt(params.epsilon)
    out = np.empty_like(y)
    out[..., 0] = y[..., 0] / se
    out[..., 1] = y[..., 1] / params.epsilon
    out[..., 2] = y[..., 2] / se
    out[..., 3] = y[..., 3] / se
    return out


def map_rescaled_to_standard(y, params: ParameterSet) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    se = math.sqrt(params.epsilon)
    out = np.empty_like(y)
    out[..., 0] = y[..., 0] * se
    out[..., 1] = y[..., 1] * params.epsilon
    out[..., 2] = y[..., 2] * se
    out[..., 3] = y[..., 3] * se
    return out


def to_rescaled(s: StateStandard, params: ParameterSet) -> StateRescaled:
    return StateRescaled(*map_standard_to_rescaled(s.as_array(), params))


def from_rescaled(s: StateRescaled, params: ParameterSet) -> StateStandard:
    return StateStandard(*map_rescaled_to_standard(s.as_array(), params))
