import math

import numpy as np
import pytest

from bvpmmo import slowfast
from bvpmmo.errors import InvalidPointError
from bvpmmo.models import SQRT3, ParameterSet, b0_for_mu, rhs_standard, slow_manifold_f


def params_with_mu(mu, k1=0.9, epsilon=0.1, omega=0.1, b1=0.1):
    return ParameterSet(epsilon=epsilon, omega=omega, k1=k1, b0=b0_for_mu(mu, k1), b1=b1)


def test_left_fold_substitution():
    p = params_with_mu(-0.02)
    out = slowfast.desingularized_rhs((0.0, 0.3, p.mu), p)
    assert np.allclose(out, (p.mu, 0.0, 0.0), atol=1e-15)


def test_projection_identity_with_standard_field():
    # on the critical manifold the desingularized field is (Ydot, f' Pdot, f' Zdot)
    rng = np.random.default_rng(21)
    p = params_with_mu(-0.015, k1=0.4, omega=0.3)
    for _ in range(100):
        X = rng.uniform(-1.5, 1.8)
        P = rng.uniform(-0.2, 0.2)
        Z = rng.uniform(-0.2, 0.2)
        full = rhs_standard(0.0, (X, float(slow_manifold_f(X)), P, Z), p)
        df = 2 * SQRT3 * X - 3 * X * X
        desing = slowfast.desingularized_rhs((X, P, Z), p)
        assert desing[0] == pytest.approx(full[1], abs=1e-14)
        assert desing[1] == pytest.approx(df * full[2], abs=1e-14)
        assert desing[2] == pytest.approx(df * full[3], abs=1e-14)


def test_right_fold_stationary_z():
    # X' = 0 at the right fold forces Z = (2 sqrt3/3)(2 k1/3 - 1)
    for k1 in (0.0, 0.2, 0.9, 1.0):
        p = params_with_mu(0.0, k1=max(k1, 0.0))
        Xr = 2 * SQRT3 / 3
        z_expect = (2 * SQRT3 / 3) * (2 * k1 / 3 - 1)
        out = slowfast.desingularized_rhs((Xr, 0.1, z_expect), p)
        assert out[0] == pytest.approx(0.0, abs=1e-14)


def test_folded_pair_locations():
    p = params_with_mu(0.0, b1=0.1)
    eqs = slowfast.folded_equilibria(p)
    assert len(eqs) == 2
    locs = sorted(e.location[1] for e in eqs)
    assert locs == pytest.approx([-0.1, 0.1], abs=1e-15)
    assert all(e.location[0] == 0.0 and e.location[2] == 0.0 for e in eqs)
    assert all(e.branch == "left" for e in eqs)
    # node first, saddle second
    assert eqs[0].classification == "folded-node"
    assert eqs[1].classification == "folded-saddle"


def test_outside_domain_is_empty():
    p = params_with_mu(0.02, b1=0.01)
    assert slowfast.folded_equilibria(p) == []


def test_merged_saddle_node():
    p = params_with_mu(0.01, b1=0.01)
    eqs = slowfast.folded_equilibria(p)
    assert len(eqs) == 1
    e = eqs[0]
    assert e.location == (0.0, 0.0, 0.0)
    assert e.classification == "folded-saddle-node"
    # nonzero eigenvalues are exactly {1, 0}
    lams = sorted(z.real for z in e.eigenvalues)
    assert lams == pytest.approx([0.0, 0.0, 1.0], abs=1e-14)
    # zero-eigenvalue generalized eigenspace has a direction transversal to
    # the fold line (nonzero X component)
    J = slowfast.desingularized_jacobian(e.location, p)
    ns = _nullspace(J @ J)
    assert max(abs(v[0]) for v in ns.T) > 1e-8


def _nullspace(M, tol=1e-10):
    _, s, vt = np.linalg.svd(M)
    return vt[s.size - (s < tol).sum():].T if (s < tol).sum() else np.empty((M.shape[0], 0))


def test_zero_eigenvector_along_p_at_split_points():
    p = params_with_mu(0.0, b1=0.1)
    for e in slowfast.folded_equilibria(p):
        J = slowfast.desingularized_jacobian(e.location, p)
        ns = _nullspace(J)
        assert ns.shape[1] == 1
        v = ns[:, 0] / np.linalg.norm(ns[:, 0])
        assert abs(abs(v[1]) - 1.0) < 1e-10  # P-direction


def test_paper_eigenvalue_example():
    # omega = 0.1, B1 = 0.1, mu = 0: saddle radicand 1 + 8 sqrt3/100
    p = params_with_mu(0.0, omega=0.1, b1=0.1)
    saddle = slowfast.folded_equilibria(p)[1]
    lams = sorted(z.real for z in saddle.eigenvalues)
    rad = 1 + 8 * SQRT3 * 0.1 * 0.1
    assert rad == pytest.approx(1.1386, abs=2e-4)
    assert lams[0] == pytest.approx(0.5 - 0.5 * math.sqrt(rad), abs=1e-12)
    assert lams[2] == pytest.approx(0.5 + 0.5 * math.sqrt(rad), abs=1e-12)
    assert lams[0] == pytest.approx(-0.0335, abs=5e-5)
    assert lams[2] == pytest.approx(1.0335, abs=5e-5)


def test_small_omega_limit():
    p = params_with_mu(0.0, omega=1e-12, b1=0.1)
    for e in slowfast.folded_equilibria(p):
        lams = sorted(z.real for z in e.eigenvalues)
        assert lams == pytest.approx([0.0, 0.0, 1.0], abs=1e-5)


def test_focus_for_strong_rotation():
    # radicand < 0 on the node side for large omega * sqrt(B1^2 - mu^2)
    p = params_with_mu(0.0, omega=2.0, b1=0.5)
    node_side = slowfast.folded_equilibria(p)[0]
    assert node_side.classification == "folded-focus"
    J = slowfast.desingularized_jacobian(node_side.location, p)
    w = np.linalg.eigvals(J)
    assert max(abs(z.imag) for z in w) > 0.1


def test_analytic_vs_numeric_eigenvalues_random_sweep():
    rng = np.random.default_rng(42)
    checked = 0
    while checked < 100:
        b1 = rng.uniform(0.01, 0.2)
        mu = rng.uniform(-b1, b1)
        if abs(mu) >= b1 - 1e-6:
            continue
        omega = rng.uniform(0.01, 0.5)
        k1 = rng.uniform(0.0, 1.0)
        p = params_with_mu(mu, k1=k1, omega=omega, b1=b1)
        for e in slowfast.folded_equilibria(p):
            if e.branch != "left":
                continue
            J = slowfast.desingularized_jacobian(e.location, p)
            numeric = np.sort_complex(np.linalg.eigvals(J))
            analytic = np.sort_complex(np.array(e.eigenvalues))
            scale = max(1.0, np.abs(analytic).max())
            assert np.abs(numeric - analytic).max() < 1e-8 * scale
        checked += 1


def test_residuals_below_tolerance():
    for mu, b1 in ((0.0, 0.1), (0.05, 0.1), (0.01, 0.01)):
        p = params_with_mu(mu, b1=b1)
        for e in slowfast.folded_equilibria(p):
            res = np.linalg.norm(slowfast.desingularized_rhs(e.location, p))
            assert res < 1e-12


def test_invalid_point_rejected():
    p = params_with_mu(0.0)
    with pytest.raises(InvalidPointError):
        slowfast.folded_eigenvalues((0.0, 0.1, 0.05), p)  # Z != 0: not stationary
    with pytest.raises(InvalidPointError):
        slowfast.folded_eigenvalues((0.3, 0.1, 0.0), p)  # not on a fold


def test_right_fold_inside_domain_when_forcing_is_huge():
    # push B1 large enough that the right-fold Z lies on the circle
    k1 = 0.5
    z_right = (2 * SQRT3 / 3) * (2 * k1 / 3 - 1)
    p = ParameterSet(epsilon=0.1, omega=0.1, k1=k1, b0=b0_for_mu(0.0, k1), b1=abs(z_right) + 0.1)
    eqs = slowfast.folded_equilibria(p)
    right = [e for e in eqs if e.branch == "right"]
    assert len(right) == 2
    for e in right:
        assert e.location[2] == pytest.approx(z_right, abs=1e-14)
        J = slowfast.desingularized_jacobian(e.location, p)
        numeric = np.sort_complex(np.linalg.eigvals(J))
        analytic = np.sort_complex(np.array(e.eigenvalues))
        assert np.abs(numeric - analytic).max() < 1e-8
