"""Attractor classification and reduced-model analysis.

This module covers four groups of operations:

* oscillation signatures: peak/trough extraction, large/small labeling,
  run compression into (L, s) pairs, periodicity detection, and the
  torus / bursting detectors;
* the one-dimensional return map of the global relaxation loop, both the
  closed-form approximation W1 = W0 + 3 omega (1 - k1/2) with its
  reflecting-wall cosine folding and a full-simulation counterpart;
* the return integral of f'(X)/(X - k1 f(X)) over the two slow segments of
  the loop;
* the planar (B1 = 0) Hopf machinery: equilibrium location, first Lyapunov
  coefficient with exact polynomial partial derivatives, and the
  degenerate-Hopf (Bautin) point where the coefficient changes sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import (
    BracketError,
    InsufficientDataError,
    NoReturnError,
    NotAHopfError,
    QuadratureError,
)
from .integrate import EventSpec, IntegratorConfig, SectionEvent, Trajectory, integrate
from .models import (
    SQRT3,
    ParameterSet,
    b0_for_mu,
    jac_autonomous,
    jac_standard,
    rhs_autonomous,
    rhs_standard,
    slow_manifold_df,
    slow_manifold_f,
    slow_manifold_y_original,
)

# ---------------------------------------------------------------------------
# Oscillation signatures


@dataclass(frozen=True)
class SignatureConfig:
    """Thresholds for oscillation labeling and periodicity detection."""

    large_threshold: float = 1.0  # x-span separating LAO from SAO
    min_span: float = 1e-6  # below this an extremum pair is numerical noise
    min_oscillations: int = 3
    recurrence_tol: float = 1e-4  # Euclidean state recurrence for periodicity
    min_repeats: int = 2  # pair-sequence repeats required for a period
    burst_threshold: int = 5  # consecutive LAOs that qualify as a burst


@dataclass(frozen=True)
class Oscillation:
    """One peak-to-trough swing of the fast variable."""

    t_peak: float
    peak: float
    t_trough: float
    trough: float
    state_at_peak: np.ndarray

    @property
    def span(self) -> float:
        return self.peak - self.trough


@dataclass(frozen=True)
class MMOSignature:
    """Symbolic oscillation pattern of one attractor.

    ``kind`` is one of 'small-cycle', 'relaxation', 'mmo' (periodic mixed
    pattern), 'aperiodic' (mixed, no period detected).  For mixed kinds
    ``pairs`` holds (large-run, small-run) counts: one period when periodic,
    the observed window otherwise.
    """

    kind: str
    pairs: tuple[tuple[int, int], ...]
    periodic: bool
    n_large: int
    n_small: int
    labels: str = ""
    period_time: float | None = None

    def compact(self) -> str:
        if self.kind in ("small-cycle", "relaxation", "torus", "bursting"):
            return self.kind
        body = " ".join(f"{L}^{s}" for L, s in self.pairs)
        return body if self.periodic else f"aperiodic[{body}]"


def oscillations_from_events(traj: Trajectory, min_span: float) -> list[Oscillation]:
    """Pair each local maximum of the fast variable with the following minimum."""
    exts = traj.events_of_kind("local-extremum")
    out = []
    peak = None
    for e in exts:
        if e.direction < 0:  # rate crosses zero downward: maximum
            peak = e
        elif peak is not None:
            osc = Oscillation(peak.t, peak.state[0], e.t, e.state[0], peak.state)
            if osc.span >= min_span:
                out.append(osc)
            peak = None
    return out


def _labels(oscs: Sequence[Oscillation], threshold: float) -> str:
    return "".join("L" if o.span > threshold else "s" for o in oscs)


def _complete_pairs(labels: str):
    """Compress into complete (L-run, s-run) cycles; returns (pairs, start_idx).

    The leading partial run (before the first L) and the trailing unclosed
    run are dropped so the pairs are insensitive to window phase.
    """
    runs = []
    for c in labels:
        if runs and runs[-1][0] == c:
            runs[-1][1] += 1
        else:
            runs.append([c, 1])
    # index of first L-run
    first = next((i for i, r in enumerate(runs) if r[0] == "L"), None)
    if first is None:
        return [], 0
    start_idx = sum(r[1] for r in runs[:first])
    pairs = []
    i = first
    while i + 1 < len(runs):
        if runs[i][0] == "L" and runs[i + 1][0] == "s":
            pairs.append((runs[i][1], runs[i + 1][1]))
        i += 2
    return pairs, start_idx


def _detect_period(pairs, oscs, start_idx, cfg: SignatureConfig):
    """Smallest repeating pair block confirmed by state recurrence at peaks."""
    n = len(pairs)
    # oscillation index of the first oscillation of each pair
    firsts = []
    idx = start_idx
    for L, s in pairs:
        firsts.append(idx)
        idx += L + s
    for p in range(1, n // cfg.min_repeats + 1):
        if n - p < p * (cfg.min_repeats - 1):
            break
        if any(pairs[i] != pairs[i + p] for i in range(n - p)):
            continue
        a = oscs[firsts[0]].state_at_peak
        b = oscs[firsts[p]].state_at_peak
        if np.linalg.norm(a - b) < cfg.recurrence_tol:
            period_time = oscs[firsts[p]].t_peak - oscs[firsts[0]].t_peak
            return p, period_time
    return None, None


def extract_signature(traj: Trajectory, config: SignatureConfig | None = None) -> MMOSignature:
    """Classify a post-transient trajectory by its oscillation pattern.

    The trajectory must carry 'local-extremum' events of the fast variable
    (see :func:`attractor_trajectory`).  Raises
    :class:`InsufficientDataError` below ``min_oscillations``.
    """
    cfg = config or SignatureConfig()
    oscs = oscillations_from_events(traj, cfg.min_span)
    if len(oscs) < cfg.min_oscillations:
        raise InsufficientDataError(f"only {len(oscs)} oscillations detected")
    labels = _labels(oscs, cfg.large_threshold)
    n_large = labels.count("L")
    n_small = labels.count("s")
    if n_large == 0:
        return MMOSignature("small-cycle", (), False, 0, n_small, labels)
    if n_small == 0:
        return MMOSignature("relaxation", (), False, n_large, 0, labels)
    pairs, start_idx = _complete_pairs(labels)
    if not pairs:
        return MMOSignature("aperiodic", (), False, n_large, n_small, labels)
    period, period_time = _detect_period(pairs, oscs, start_idx, cfg)
    if period is not None:
        return MMOSignature(
            "mmo", tuple(pairs[:period]), True, n_large, n_small, labels, period_time
        )
    return MMOSignature("aperiodic", tuple(pairs), False, n_large, n_small, labels)


def signature_from_series(t, x, config: SignatureConfig | None = None) -> MMOSignature:
    """Signature of a sampled scalar series (externally produced data).

    Extrema come from sample-level slope changes; periodicity uses peak
    values in place of full-state recurrence.
    """
    cfg = config or SignatureConfig()
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    if len(t) != len(x) or len(t) < 3:
        raise InsufficientDataError("need a t,x series with at least 3 samples")
    dx = np.sign(np.diff(x))
    oscs = []
    peak = None
    for i in np.nonzero(np.diff(dx) != 0)[0]:
        kind_max = dx[i] > 0
        if kind_max:
            peak = (t[i + 1], x[i + 1])
        elif peak is not None:
            osc = Oscillation(peak[0], peak[1], t[i + 1], x[i + 1], np.array([peak[1]]))
            if osc.span >= cfg.min_span:
                oscs.append(osc)
            peak = None
    if len(oscs) < cfg.min_oscillations:
        raise InsufficientDataError(f"only {len(oscs)} oscillations detected")
    labels = _labels(oscs, cfg.large_threshold)
    n_large, n_small = labels.count("L"), labels.count("s")
    if n_large == 0:
        return MMOSignature("small-cycle", (), False, 0, n_small, labels)
    if n_small == 0:
        return MMOSignature("relaxation", (), False, n_large, 0, labels)
    pairs, start_idx = _complete_pairs(labels)
    if not pairs:
        return MMOSignature("aperiodic", (), False, n_large, n_small, labels)
    period, period_time = _detect_period(pairs, oscs, start_idx, cfg)
    if period is not None:
        return MMOSignature(
            "mmo", tuple(pairs[:period]), True, n_large, n_small, labels, period_time
        )
    return MMOSignature("aperiodic", tuple(pairs), False, n_large, n_small, labels)


def detect_bursting(signature, burst_threshold: int = 5) -> bool:
    """True when at least two long LAO trains alternate with SAO epochs.

    Accepts an :class:`MMOSignature` or an iterable of (L, s) pairs.  A
    train qualifies when its consecutive-LAO count reaches
    ``burst_threshold``; pure relaxation (no SAO epochs at all) and pure
    small-oscillation streams are not bursting.
    """
    if isinstance(signature, MMOSignature):
        if signature.kind in ("small-cycle", "relaxation"):
            return False
        pairs = signature.pairs
    else:
        pairs = tuple(signature)
    long_trains = [p for p in pairs if p[0] >= burst_threshold and p[1] >= 1]
    return len(long_trains) >= 2


# ---------------------------------------------------------------------------
# Torus detection


@dataclass(frozen=True)
class TorusResult:
    is_torus: bool
    ordering: np.ndarray | None = None
    reason: str = ""


def detect_torus(
    points,
    min_points: int = 200,
    recurrence_tol: float = 1e-4,
    pca_ratio_max: float = 0.2,
    neighbors: int = 8,
    connect_factor: float = 3.0,
) -> TorusResult:
    """Decide whether section points fill a closed 1D loop.

    Tests applied in order: enough distinct points (a finite recurring set
    is a periodic orbit, not a torus); local one-dimensionality (median
    minor/major axis ratio of each point's neighborhood); no endpoints (every
    point has neighbors on both sides of its local axis, so the curve closes);
    single component under nearest-neighbor linkage at a radius proportional
    to the largest nearest-neighbor gap.  On success the returned ordering
    walks the loop by nearest unvisited neighbor.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < min_points:
        raise InsufficientDataError(f"need at least {min_points} section points, got {n}")

    d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
    np.fill_diagonal(d2, np.inf)

    # finite recurrence: greedy clustering at the recurrence tolerance
    tol2 = recurrence_tol**2
    unclaimed = np.ones(n, bool)
    clusters = 0
    for i in range(n):
        if unclaimed[i]:
            clusters += 1
            unclaimed &= d2[i] > tol2
            unclaimed[i] = False
    if clusters < 0.9 * n:
        return TorusResult(False, None, f"finite point set ({clusters} distinct)")

    nn_idx = np.argsort(d2, axis=1)[:, :neighbors]
    nn_dist = np.sqrt(d2[np.arange(n), nn_idx[:, 0]])

    ratios = np.empty(n)
    endpoints = 0
    for i in range(n):
        nb = pts[nn_idx[i]] - pts[i]
        centered = nb - nb.mean(axis=0)
        w, v = np.linalg.eigh(centered.T @ centered)
        ratios[i] = math.sqrt(max(w[0], 0.0) / max(w[-1], 1e-300))
        proj = nb @ v[:, -1]
        if proj.min() > 0.0 or proj.max() < 0.0:
            endpoints += 1
    med_ratio = float(np.median(ratios))
    if med_ratio > pca_ratio_max:
        return TorusResult(False, None, f"not locally 1D (ratio {med_ratio:.3f})")
    if endpoints > 0:
        return TorusResult(False, None, f"{endpoints} curve endpoints found")

    # single loop: radius graph must connect all points
    radius = connect_factor * float(nn_dist.max())
    adj = d2 <= radius * radius
    seen = np.zeros(n, bool)
    stack = [0]
    seen[0] = True
    while stack:
        u = stack.pop()
        for v2 in np.nonzero(adj[u])[0]:
            if not seen[v2]:
                seen[v2] = True
                stack.append(v2)
    if not seen.all():
        return TorusResult(False, None, f"{int(seen.sum())}/{n} points in one component")

    # best-effort loop ordering by nearest unvisited neighbor
    order = [0]
    visited = np.zeros(n, bool)
    visited[0] = True
    for _ in range(n - 1):
        row = d2[order[-1]].copy()
        row[visited] = np.inf
        j = int(np.argmin(row))
        order.append(j)
        visited[j] = True
    return TorusResult(True, np.array(order), "closed curve")


# ---------------------------------------------------------------------------
# Return map


@dataclass(frozen=True)
class ReturnMapSample:
    """One global return: numeric simulation against the closed-form map."""

    w0: float
    p0: float
    w1_numeric: float
    w1_analytic: float
    p1_numeric: float
    p1_analytic: float
    walls_crossed: int
    t_return: float


def delta_w(k1: float, omega: float) -> float:
    """Phase advance of W = omega*t over one global return: 3 omega (1 - k1/2)."""
    return 3.0 * omega * (1.0 - 0.5 * k1)


def w_from_p(p0: float, params: ParameterSet, increasing: bool) -> float:
    """Phase on the forcing circle from P and its direction of motion.

    W = arccos(P0/B1) while P decreases, 2 pi - arccos(P0/B1) while it
    increases.  Raises ValueError outside the domain |P0| <= B1.
    """
    if abs(p0) > params.b1:
        raise ValueError(f"|P0| = {abs(p0):.6g} exceeds B1 = {params.b1:.6g}")
    w = math.acos(p0 / params.b1)
    return 2.0 * math.pi - w if increasing else w


def return_map_analytic(w0: float, params: ParameterSet) -> tuple[float, float]:
    """Closed-form return map on W in [0, 3 pi].

    W1 = W0 + 3 omega (1 - k1/2) and P1 = B1 cos(W1); the cosine implements
    the reflection at the domain walls P = +-B1, and is identical to
    B1 cos(arccos(P0/B1) -+ 3 omega (1 - k1/2)) with the sign tied to the
    direction of P.
    """
    if not 0.0 <= w0 <= 3.0 * math.pi:
        raise ValueError("W0 must lie in [0, 3*pi]")
    w1 = w0 + delta_w(params.k1, params.omega)
    return w1, params.b1 * math.cos(w1)


def iterate_return_map(w0: float, params: ParameterSet, n: int) -> np.ndarray:
    """n compositions of the analytic map; rows (W mod 2 pi, P)."""
    out = np.empty((n + 1, 2))
    w = w0 % (2.0 * math.pi)
    out[0] = (w, params.b1 * math.cos(w))
    for i in range(1, n + 1):
        w = (w + delta_w(params.k1, params.omega)) % (2.0 * math.pi)
        out[i] = (w, params.b1 * math.cos(w))
    return out


def _return_integrand(x, k1):
    return slow_manifold_df(x) / (x - k1 * slow_manifold_f(x))


def return_integral(k1: float) -> float:
    """Quadrature of f'(X)/(X - k1 f(X)) over the two slow segments of the loop.

    X runs from sqrt(3) down to 2 sqrt(3)/3 on the right sheet and from
    -sqrt(3)/3 up to 0 on the left sheet; equals exactly 3 at k1 = 0 and
    approximately 3 (1 - k1/2) for small k1.
    """
    seg1, err1 = quad(_return_integrand, SQRT3, 2.0 * SQRT3 / 3.0, args=(k1,),
                      epsabs=1e-13, epsrel=1e-13, limit=200)
    seg2, err2 = quad(_return_integrand, -SQRT3 / 3.0, 0.0, args=(k1,),
                      epsabs=1e-13, epsrel=1e-13, limit=200)
    if err1 + err2 > 1e-8:
        raise QuadratureError(f"return integral error estimate {err1 + err2:.3g}")
    return seg1 + seg2


def return_map_numeric(
    params: ParameterSet,
    p0: float,
    increasing: bool = False,
    section_offset: float = -0.2,
    config: IntegratorConfig | None = None,
    max_time: float = 80.0,
) -> ReturnMapSample:
    """Simulate one global return of the standard-form system.

    The start point sits on the left attracting sheet at X = section_offset
    with (P0, Z0) on the forcing circle; the loop is complete at the first
    upward crossing of {X = section_offset} after the jump past the fold
    (detected as an upward crossing of X = 1).  Raises
    :class:`NoReturnError` when the trajectory lingers in the fold region
    instead of completing the loop.
    """
    if abs(p0) > params.b1:
        raise ValueError(f"|P0| = {abs(p0):.6g} exceeds B1 = {params.b1:.6g}")
    x0 = section_offset
    z0 = params.mu + math.sqrt(params.b1**2 - p0**2) * (-1.0 if increasing else 1.0)
    f0 = float(slow_manifold_f(x0))
    df0 = float(slow_manifold_df(x0))
    y0 = f0 - params.epsilon * (x0 - params.k1 * f0 + z0) / df0
    w0 = w_from_p(p0, params, increasing)

    fun = lambda t, y: rhs_standard(t, y, params)
    jac = lambda t, y: jac_standard(t, y, params)
    jump = EventSpec(lambda t, y: y[0] - 1.0, kind="jump", direction=+1)
    arrive = EventSpec(lambda t, y: y[0] - section_offset, kind="section-crossing", direction=+1)
    traj = integrate(
        fun, [x0, y0, p0, z0], (0.0, max_time), config, events=[jump, arrive],
        jac=jac, chart="standard", params=params, dense=False,
    )
    t_jump = next((e.t for e in traj.events if e.kind == "jump"), None)
    if t_jump is None:
        raise NoReturnError("no jump past the fold within the time budget")
    hit = next(
        (e for e in traj.events if e.kind == "section-crossing" and e.t > t_jump), None
    )
    if hit is None:
        raise NoReturnError("loop never returned to the section after the jump")

    w1_num = w0 + params.omega * hit.t
    w1_ana, p1_ana = return_map_analytic(w0, params)
    walls = int(math.floor(w1_ana / math.pi)) - int(math.floor(w0 / math.pi))
    return ReturnMapSample(
        w0=w0,
        p0=p0,
        w1_numeric=w1_num,
        w1_analytic=w1_ana,
        p1_numeric=float(hit.state[2]),
        p1_analytic=p1_ana,
        walls_crossed=walls,
        t_return=hit.t,
    )


# ---------------------------------------------------------------------------
# Planar Hopf machinery (B1 = 0)


@dataclass(frozen=True)
class HopfPoint:
    """Planar Hopf point on the trace-zero curve with its criticality."""

    k1: float
    epsilon: float
    b0: float
    x_eq: float
    y_eq: float
    omega0: float
    l1: float
    criticality: str  # 'sub', 'super', or 'degenerate'


def equilibrium_x(k1: float, b0: float) -> float:
    """Unique real root of k1 x^3 + (1 - k1) x = b0 (monotone cubic)."""
    if k1 == 0.0:
        return b0
    roots = np.roots([k1, 0.0, 1.0 - k1, -b0])
    real = roots[np.abs(roots.imag) < 1e-8 * (1.0 + np.abs(roots.real))].real
    x = float(real[np.argmin(np.abs(real))]) if len(real) == 1 else float(real[0])
    for _ in range(3):  # Newton polish
        fx = k1 * x**3 + (1.0 - k1) * x - b0
        x -= fx / (3.0 * k1 * x * x + 1.0 - k1)
    return x


def planar_jacobian(x: float, k1: float, epsilon: float) -> np.ndarray:
    return np.array([[(1.0 - 3.0 * x * x) / epsilon, 1.0 / epsilon], [-1.0, -k1]])


def first_lyapunov_coefficient(x_eq: float, k1: float, epsilon: float) -> float:
    """First Lyapunov coefficient of the planar system at a trace-zero point.

    The field is brought to normal-form coordinates by the linear change
    built from the critical eigenvector; all second and third partial
    derivatives of the cubic nonlinearity are exact polynomials, and the
    standard planar normal-form expression is evaluated on them.
    """
    A = planar_jacobian(x_eq, k1, epsilon)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if det <= 0.0:
        raise NotAHopfError(f"determinant {det:.6g} is not positive")
    omega0 = math.sqrt(det)
    # eigenvector for i*omega0: q = (1, (i*omega0 - a11)/a12)
    q2 = complex(0.0, omega0) - A[0, 0]
    q2 /= A[0, 1]
    T = np.array([[1.0, 0.0], [q2.real, -q2.imag]])
    S = np.linalg.inv(T)

    # nonlinearity lives in the fast component only: N(u) = c2 u^2 + c3 u^3
    c2 = -3.0 * x_eq / epsilon
    c3 = -1.0 / epsilon
    p, r = T[0, 0], T[0, 1]  # u = p*u~ + r*v~
    alpha, beta = S[0, 0], S[1, 0]

    fuu = alpha * 2.0 * c2 * p * p
    fuv = alpha * 2.0 * c2 * p * r
    fvv = alpha * 2.0 * c2 * r * r
    fuuu = alpha * 6.0 * c3 * p**3
    fuvv = alpha * 6.0 * c3 * p * r * r
    guu = beta * 2.0 * c2 * p * p
    guv = beta * 2.0 * c2 * p * r
    gvv = beta * 2.0 * c2 * r * r
    guuv = beta * 6.0 * c3 * p * p * r
    gvvv = beta * 6.0 * c3 * r**3

    a = (fuuu + fuvv + guuv + gvvv) / 16.0 + (
        fuv * (fuu + fvv) - guv * (guu + gvv) - fuu * guu + fvv * gvv
    ) / (16.0 * omega0)
    return float(a)


def hopf_locate(k1: float, epsilon: float, l1_tol: float = 1e-8) -> HopfPoint:
    """Hopf point of the planar system at fixed k1.

    The trace vanishes at x^2 = (1 - epsilon k1)/3 (positive root, near the
    right fold); the bias is recovered from the equilibrium cubic and the
    criticality from the sign of the first Lyapunov coefficient.
    """
    if not 0.0 < k1 < 1.0:
        raise ValueError("k1 must lie in (0, 1)")
    if epsilon <= 0.0:
        raise ValueError("epsilon must be positive")
    x = math.sqrt((1.0 - epsilon * k1) / 3.0)
    b0 = k1 * x**3 + (1.0 - k1) * x
    A = planar_jacobian(x, k1, epsilon)
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    if det <= 0.0:
        raise NotAHopfError(f"determinant {det:.6g} at the trace-zero point")
    l1 = first_lyapunov_coefficient(x, k1, epsilon)
    if abs(l1) < l1_tol:
        crit = "degenerate"
    else:
        crit = "sub" if l1 > 0.0 else "super"
    return HopfPoint(
        k1=k1,
        epsilon=epsilon,
        b0=b0,
        x_eq=x,
        y_eq=x**3 - x,
        omega0=math.sqrt(det),
        l1=l1,
        criticality=crit,
    )


def bautin_locate(epsilon: float, bracket: tuple[float, float] = (0.2, 0.9)) -> tuple[float, float]:
    """Degenerate-Hopf point: (k1*, B0*) where the Lyapunov coefficient vanishes.

    Scans the Hopf curve over the k1 bracket; raises :class:`BracketError`
    when the coefficient does not change sign there.
    """
    f = lambda k: hopf_locate(k, epsilon, l1_tol=0.0).l1
    fa, fb = f(bracket[0]), f(bracket[1])
    if fa * fb > 0.0:
        raise BracketError(
            f"l1 has the same sign at k1 = {bracket[0]} and {bracket[1]}"
        )
    k1_star = brentq(f, bracket[0], bracket[1], xtol=1e-12)
    return float(k1_star), hopf_locate(k1_star, epsilon, l1_tol=np.inf).b0


def mu_of(params: ParameterSet) -> float:
    """Unfolding parameter of a parameter set (alias for ``params.mu``)."""
    return params.mu


def b0_of_mu(mu: float, k1: float) -> float:
    """Bias realizing a prescribed unfolding parameter (inverse of mu)."""
    return b0_for_mu(mu, k1)


# ---------------------------------------------------------------------------
# Simulation drivers shared by the CLI and the test suites


def default_initial_state(params: ParameterSet, chart: str = "original") -> np.ndarray:
    """A point on an attracting sheet with the forcing phase at z = 0."""
    if chart == "original":
        x0 = -1.0
        return np.array([x0, float(slow_manifold_y_original(x0)), 1.0, 0.0])
    if chart == "standard":
        x0 = -0.5
        return np.array(
            [x0, float(slow_manifold_f(x0)), params.b1, params.mu]
        )
    raise ValueError(f"no default initial state for chart {chart!r}")


def attractor_trajectory(
    params: ParameterSet,
    config: IntegratorConfig | None = None,
    *,
    transient_periods: float = 20.0,
    collect_periods: float = 8.0,
    y0=None,
    chart: str = "original",
    with_section: bool = True,
) -> Trajectory:
    """Integrate past the transient and record extrema (and section crossings).

    The returned trajectory covers only the collection window and carries
    'local-extremum' events of the fast variable; with ``with_section`` it
    also records upward crossings of {z = 0} (one per forcing period).
    """
    if chart == "original":
        fun = lambda t, y: rhs_autonomous(t, y, params)
        jac = lambda t, y: jac_autonomous(t, y, params)
    elif chart == "standard":
        fun = lambda t, y: rhs_standard(t, y, params)
        jac = lambda t, y: jac_standard(t, y, params)
    else:
        raise ValueError(f"unsupported chart {chart!r}")
    if y0 is None:
        y0 = default_initial_state(params, chart)
    period = 2.0 * math.pi / params.omega
    t_trans = transient_periods * period
    start = np.asarray(y0, dtype=float)
    t0 = 0.0
    if t_trans > 0.0:
        warm = integrate(fun, start, (0.0, t_trans), config, jac=jac, dense=False,
                         chart=chart, params=params)
        start, t0 = warm.y[-1], warm.t[-1]
    events = [EventSpec(lambda t, y: fun(t, y)[0], kind="local-extremum", direction=0)]
    if with_section:
        # z in the original chart; (Z - mu) in the standard chart
        if chart == "original":
            events.append(EventSpec(lambda t, y: y[3], kind="section-crossing", direction=+1))
        else:
            events.append(
                EventSpec(lambda t, y: y[3] - params.mu, kind="section-crossing", direction=+1)
            )
    return integrate(
        fun, start, (t0, t0 + collect_periods * period), config, events=events,
        jac=jac, chart=chart, params=params, dense=False,
    )


def section_points(traj: Trajectory, components=(0, 1)) -> np.ndarray:
    """Section-crossing states of a trajectory projected to two components."""
    ev = traj.events_of_kind("section-crossing")
    if not ev:
        return np.empty((0, len(components)))
    return np.array([[e.state[c] for c in components] for e in ev])
