import math

import numpy as np
import pytest

from bvpmmo import canard
from bvpmmo.integrate import IntegratorConfig, integrate
from bvpmmo.models import SQRT3, ParameterSet, b0_for_mu, rhs_rescaled


def test_hamiltonian_reference_values():
    assert canard.hamiltonian(0.0, 0.0) == pytest.approx(1.0 / 12.0, abs=1e-16)
    xb, yb = canard.singular_canard(np.array([-2.0, 0.0, 3.7]))
    assert np.abs(canard.hamiltonian(xb, yb)).max() < 1e-14


def test_singular_canard_solves_integrable_field():
    # dXb/dt = 1/(2 sqrt3) must equal -Yb + sqrt3 Xb^2 on the curve
    for t in np.linspace(-5, 5, 41):
        xb, yb = canard.singular_canard(t)
        assert -yb + SQRT3 * xb * xb == pytest.approx(1.0 / (2.0 * SQRT3), abs=1e-13)
    xb0, yb0 = canard.singular_canard(0.0)
    assert (xb0, yb0) == (0.0, pytest.approx(-1.0 / (2.0 * SQRT3), abs=1e-16))


def test_hamiltonian_is_conserved_by_integrable_field():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        xb = rng.uniform(-1.0, 1.0)
        yb = rng.uniform(-1.0, 1.0)
        gx, gy = canard.hamiltonian_gradient(xb, yb)
        rhs = canard.frozen_planar_rhs(0.0, (xb, yb), k1=0.0, epsilon=0.0, z_bar=0.0)
        assert abs(gx * rhs[0] + gy * rhs[1]) < 1e-14


def test_z_critical_values():
    zb, z = canard.z_critical_values(0.9, 0.1)
    assert z == pytest.approx(-SQRT3 * 2.8 / 240.0, abs=1e-15)
    assert z == pytest.approx(-0.020207, abs=1e-6)
    assert zb == pytest.approx(z / math.sqrt(0.1), abs=1e-15)
    # formal sanity check: 1 + 2 k1 = 0 kills the value
    assert canard.z_critical_values(-0.5, 0.1) == (0.0, 0.0)
    # exact linearity in epsilon
    assert canard.z_critical_values(0.3, 0.2)[1] == 2 * canard.z_critical_values(0.3, 0.1)[1]


def test_p_critical():
    p = ParameterSet(epsilon=0.1, omega=0.1, k1=0.9, b0=b0_for_mu(-0.03, 0.9), b1=0.1)
    pc = canard.p_critical(p)
    assert pc is not None
    assert pc[0] == pytest.approx(0.09952, abs=1e-5)
    assert pc[1] == -pc[0]  # two canards, exact mirror symmetry
    # mu at the critical Z puts the canard on the circle equator
    _, z_cr = canard.z_critical(p)
    q = ParameterSet(epsilon=0.1, omega=0.1, k1=0.9, b0=b0_for_mu(z_cr, 0.9), b1=0.1)
    assert canard.p_critical(q) == (pytest.approx(0.1, abs=1e-15), pytest.approx(-0.1, abs=1e-15))
    # outside the domain: no canard, not an exception
    r = ParameterSet(epsilon=0.1, omega=0.1, k1=0.9, b0=b0_for_mu(z_cr + 0.02, 0.9), b1=0.01)
    assert canard.p_critical(r) is None


def test_splitting_sign_and_monotonicity():
    k1, eps = 0.0, 1e-2
    zb_ana, _ = canard.z_critical_values(k1, eps)
    below = canard.splitting_distance(2.0 * zb_ana, k1, eps)
    above = canard.splitting_distance(0.2 * zb_ana, k1, eps)
    assert below < 0 < above
    zs = np.linspace(2.0 * zb_ana, 0.2 * zb_ana, 7)
    vals = [canard.splitting_distance(z, k1, eps) for z in zs]
    assert all(a < b for a, b in zip(vals, vals[1:]))


def test_oracle_brackets_and_matches_analytic():
    res = canard.numeric_canard_split(0.0, 1e-2)
    assert 0.75 <= res.ratio <= 1.25
    # the numeric value is bracketed by a sign change of the samples
    signs = [s for _, s in res.samples]
    assert min(signs) < 0 < max(signs)
    zs = [z for z, _ in res.samples]
    assert min(zs) <= res.z_bar_cr_numeric <= max(zs)
    assert res.coefficient_numeric == pytest.approx(-SQRT3 / 24.0, rel=0.05)


def test_oracle_epsilon_domain():
    with pytest.raises(ValueError):
        canard.numeric_canard_split(0.5, 0.5)
    # accepts a ParameterSet for convenience
    p = ParameterSet(epsilon=1e-2, omega=0.01, k1=0.0, b0=0.3, b1=0.01)
    res = canard.numeric_canard_split(p, 1e-2)
    assert res.k1 == 0.0


def test_h_drift_under_full_rescaled_flow():
    # drift degrades as O(sqrt(eps) + omega): small at eps = omega = 1e-4
    p = ParameterSet(epsilon=1e-4, omega=1e-4, k1=0.9, b0=b0_for_mu(0.0, 0.9), b1=1e-4)
    y0 = [0.0, -0.2, 1.0, 0.0]
    traj = integrate(lambda t, y: rhs_rescaled(t, y, p, mu_bar=0.0), y0, (0.0, 10.0),
                     IntegratorConfig())
    h = canard.hamiltonian(traj.y[:, 0], traj.y[:, 1])
    assert np.abs(h - h[0]).max() < 1e-2


def test_h_drift_integrable_limit():
    cfg = IntegratorConfig()  # default tolerances
    fun = lambda t, y: canard.frozen_planar_rhs(t, y, k1=0.0, epsilon=0.0, z_bar=0.0)
    traj = integrate(fun, [0.0, -0.2], (0.0, 20.0), cfg)
    h = canard.hamiltonian(traj.y[:, 0], traj.y[:, 1])
    assert np.abs(h - h[0]).max() < 1e-8


def _section_y_for_h(h_target):
    from scipy.optimize import brentq

    f = lambda yb: float(canard.hamiltonian(0.0, yb)) - h_target
    return brentq(f, -1.0 / (2.0 * SQRT3) - 0.2, -1.0 / (2.0 * SQRT3) + 0.2, xtol=1e-15)


def test_level_sets_separated_by_singular_canard():
    # H > 0: bounded orbits around the center; H < 0: open curves escaping in
    # Xb (finite-time blow-up along the fast direction counts as escape)
    from bvpmmo.errors import StiffnessError

    fun = lambda t, y: canard.frozen_planar_rhs(t, y, k1=0.0, epsilon=0.0, z_bar=0.0)
    tight = IntegratorConfig(rtol=1e-12, atol=1e-14)
    closed = integrate(fun, [0.0, _section_y_for_h(+1e-6)], (0.0, 40.0), tight)
    assert np.abs(closed.y[:, 0]).max() < 5.0
    try:
        opened = integrate(fun, [0.0, _section_y_for_h(-1e-6)], (0.0, 40.0), tight)
    except StiffnessError as err:
        opened = err.trajectory
    assert np.abs(opened.y[:, 0]).max() > 10.0
