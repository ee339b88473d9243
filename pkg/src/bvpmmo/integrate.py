"""Adaptive stiff integration with dense event detection.

The stepper is an L-stable implicit Runge-Kutta scheme of order 5 (Radau IIA
as implemented in scipy) with an embedded error estimate and a continuous
interpolant.  A custom driver loop walks the accepted steps, scans each
step's interpolant for sign changes of the event functions, and refines
located crossings with a bracketing root finder to the configured event
tolerance.  Tangential grazes (the event function touching zero without a
sign change) are discarded and counted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import OdeSolution, Radau
from scipy.optimize import brentq

from .errors import MaxStepsExceeded, NoCrossingError, StiffnessError


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances and budgets for a single integration."""

    rtol: float = 1e-8
    atol: float = 1e-10
    max_step: float = np.inf
    event_tol: float = 1e-10
    max_steps: int = 5_000_000
    event_subsamples: int = 8
    graze_tol: float = 1e-6

    def __post_init__(self):
        if not (self.rtol > 0 and self.atol > 0 and self.event_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (self.max_step > 0 and self.max_steps > 0 and self.event_subsamples > 0):
            raise ValueError("step budgets must be positive")


@dataclass(frozen=True)
class EventSpec:
    """Scalar event function g(t, y) whose zero crossings are recorded.

    ``direction``: +1 records only increasing crossings, -1 only decreasing,
    0 both.  ``count``: stop the integration after this many recorded
    crossings (None = never terminal).
    """

    func: Callable[[float, np.ndarray], float]
    kind: str = "section-crossing"
    direction: int = 0
    count: int | None = None


@dataclass(frozen=True)
class SectionEvent:
    """A refined event: time, interpolated state, kind, crossing direction."""

    t: float
    state: np.ndarray
    kind: str
    direction: int


@dataclass
class Trajectory:
    """Integration output: accepted steps, event records, dense interpolant."""

    t: np.ndarray
    y: np.ndarray
    chart: str = ""
    params: object = None
    events: list[SectionEvent] = field(default_factory=list)
    grazings: int = 0
    truncated: bool = False
    sol: OdeSolution | None = None

    def __post_init__(self):
        if len(self.t) != len(self.y):
            raise ValueError("times and states must have equal length")
        if len(self.t) > 1 and not np.all(np.diff(self.t) > 0):
            raise ValueError("times must be strictly increasing")

    def sample(self, ts) -> np.ndarray:
        """Evaluate the continuous interpolant; shape (len(ts), dim)."""
        if self.sol is None:
            raise ValueError("trajectory was built without dense output")
        return self.sol(np.asarray(ts)).T

    def events_of_kind(self, kind: str) -> list[SectionEvent]:
        return [e for e in self.events if e.kind == kind]


def _scan_step(dense, t_lo, t_hi, specs, counts, cfg, events_out):
    """Scan one accepted step for event crossings; returns earliest terminal time."""
    ts = np.linspace(t_lo, t_hi, cfg.event_subsamples + 1)
    ys = dense(ts)
    stop_at = None
    grazes = 0
    for i, spec in enumerate(specs):
        g = np.array([spec.func(ts[j], ys[:, j]) for j in range(len(ts))])
        for j in range(len(ts) - 1):
            ga, gb = g[j], g[j + 1]
            if ga == 0.0 and j > 0:
                continue  # root already refined at the previous bracket
            crossing = (ga * gb < 0.0) or (gb == 0.0 and ga != 0.0)
            if crossing:
                if gb == 0.0:
                    t_root = ts[j + 1]
                else:
                    t_root = brentq(
                        lambda s: spec.func(s, dense(s)),
                        ts[j],
                        ts[j + 1],
                        xtol=cfg.event_tol,
                    )
                direction = 1 if gb > ga else -1
                if spec.direction != 0 and direction != spec.direction:
                    continue
                events_out.append(
                    SectionEvent(float(t_root), dense(t_root).copy(), spec.kind, direction)
                )
                counts[i] += 1
                if spec.count is not None and counts[i] >= spec.count:
                    if stop_at is None or t_root < stop_at:
                        stop_at = float(t_root)
            elif 0 < j < len(ts) - 1:
                # tangential graze: local |g| minimum near zero, no sign change
                if (
                    abs(g[j]) < cfg.graze_tol
                    and abs(g[j]) <= abs(ga)
                    and abs(g[j]) <= abs(g[j + 1])
                    and np.sign(ga) == np.sign(g[j + 1]) != 0
                ):
                    grazes += 1
        if stop_at is not None:
            break
    return stop_at, grazes


def integrate(
    fun: Callable[[float, np.ndarray], np.ndarray],
    y0: Sequence[float],
    t_span: tuple[float, float],
    config: IntegratorConfig | None = None,
    events: Sequence[EventSpec] = (),
    jac: Callable[[float, np.ndarray], np.ndarray] | None = None,
    chart: str = "",
    params: object = None,
    dense: bool = True,
) -> Trajectory:
    """Integrate fun over t_span, refining event crossings on the interpolant.

    Raises :class:`StiffnessError` on step-size underflow and
    :class:`MaxStepsExceeded` when the step budget runs out; both carry the
    partial trajectory (flagged ``truncated``) on the exception.
    """
    cfg = config or IntegratorConfig()
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError("time span must have positive length")
    y0 = np.asarray(y0, dtype=float)

    solver = Radau(
        fun, t0, y0, t1, rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step, jac=jac
    )
    ts = [t0]
    ys = [y0.copy()]
    segments = []
    events_out: list[SectionEvent] = []
    counts = [0] * len(events)
    grazings = 0
    nsteps = 0

    def partial(truncated=True):
        sol = OdeSolution(np.array(ts), segments) if (dense and segments) else None
        return Trajectory(
            np.array(ts), np.array(ys), chart, params, events_out, grazings, truncated, sol
        )

    while solver.status == "running":
        if nsteps >= cfg.max_steps:
            raise MaxStepsExceeded(
                f"exceeded {cfg.max_steps} steps at t={solver.t:.6g}", partial()
            )
        msg = solver.step()
        nsteps += 1
        if solver.status == "failed":
            raise StiffnessError(
                f"step size underflow at t={solver.t:.6g}: {msg}", partial()
            )
        dense_step = solver.dense_output()
        stop_at = None
        if events:
            stop_at, g = _scan_step(
                dense_step, solver.t_old, solver.t, events, counts, cfg, events_out
            )
            grazings += g
        if stop_at is not None:
            segments.append(dense_step)
            ts.append(stop_at)
            ys.append(dense_step(stop_at).copy())
            return partial(truncated=False)
        segments.append(dense_step)
        ts.append(solver.t)
        ys.append(solver.y.copy())

    return partial(truncated=False)


def poincare_section(
    fun,
    y0,
    section: Callable[[float, np.ndarray], float],
    n_crossings: int,
    config: IntegratorConfig | None = None,
    *,
    direction: int = 1,
    t0: float = 0.0,
    transient: float = 0.0,
    max_time: float | None = None,
    jac=None,
    chart: str = "",
    params: object = None,
) -> list[SectionEvent]:
    """First ``n_crossings`` directed crossings of {section = 0} after a transient.

    ``max_time`` caps the total integration time (transient included); if the
    crossings are not found in time a :class:`NoCrossingError` is raised.
    When ``params`` carries an ``omega``, the default budget allows one
    forcing period per requested crossing plus margin.
    """
    if max_time is None:
        omega = getattr(params, "omega", None)
        if omega is None:
            raise ValueError("max_time is required when params.omega is unavailable")
        max_time = transient + (n_crossings + 5) * 2.0 * np.pi / omega
    start = np.asarray(y0, dtype=float)
    t_start = t0
    if transient > 0.0:
        warm = integrate(
            fun, start, (t0, t0 + transient), config, jac=jac, dense=False,
            chart=chart, params=params,
        )
        start = warm.y[-1]
        t_start = warm.t[-1]
    spec = EventSpec(section, kind="section-crossing", direction=direction, count=n_crossings)
    traj = integrate(
        fun, start, (t_start, t0 + max_time), config, events=[spec], jac=jac,
        dense=False, chart=chart, params=params,
    )
    hits = traj.events_of_kind("section-crossing")
    if len(hits) < n_crossings:
        raise NoCrossingError(
            f"found {len(hits)}/{n_crossings} crossings within t={max_time:.6g}"
        )
    return hits
