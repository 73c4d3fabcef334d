import math

import numpy as np
import pytest

from minkforms.boundary import (
    MovingBoundary,
    boundary_kinematics_residual,
    engineering_jump_residuals,
    jump_residual_F,
    jump_residual_G,
)
from minkforms.exterior import KVector, contract_left, hodge, wedge
from minkforms.identities import random_form, random_lorentzian_metric
from minkforms.media import ETA, engineering_from_2form, two_form_from_engineering
from minkforms.wwe import WWEConfig, exterior_field, solve

from conftest import blade


def test_jump_F_examples(rng):
    F = random_form(rng, 2)
    n = blade(1)
    assert jump_residual_F(F, F, n).norm() == 0.0
    delta = 0.3
    res = jump_residual_F(blade(0, 2) * delta, KVector.zero(2), n)
    assert res.allclose(KVector.basis(0, 2, 1) * delta, atol=0.0)
    assert res.norm() > 0


def test_jump_G_examples(rng):
    G = random_form(rng, 2)
    assert jump_residual_G(G, G, blade(1), ETA).norm() == 0.0
    res = [jump_residual_G(blade(1, 2), blade(1, 2) * (1 + d), blade(1), ETA).norm() for d in (1e-3, 2e-3)]
    assert res[1] / res[0] == pytest.approx(2.0, rel=1e-12)


def test_wwe_outer_wall_jumps():
    cfg = WWEConfig(0.1, 0.2, 0.5, 4.0, 2.0, 1.3)
    sol = solve(cfg)
    F0 = exterior_field(cfg)
    for rb in (cfg.r1, cfg.r2):
        assert jump_residual_F(F0, sol.F(rb), blade(1)).norm() < 1e-12
        assert jump_residual_G(F0, sol.G(rb), blade(1), ETA).norm() < 1e-12
    bad = sol.with_constants(c2=cfg.B0 + 1e-3)
    assert jump_residual_G(F0, bad.G(cfg.r2), blade(1), ETA).norm() == pytest.approx(1e-3, rel=1e-9)


def test_duality_equivalences(rng):
    for _ in range(200):
        m = random_lorentzian_metric(rng)
        n = random_form(rng, 1)
        G = random_form(rng, 2)
        # *([G] |_ n) = [*G] ^ n
        lhs = hodge(jump_residual_G(G, KVector.zero(2), n, m), m)
        rhs = wedge(hodge(G, m), n)
        assert lhs.allclose(rhs, atol=1e-10 * max(1.0, rhs.norm()))
    # [F] ^ n = 0  <=>  [*F] |_ n = 0: a jump of the form n ^ a satisfies both
    m = random_lorentzian_metric(rng)
    n, a = random_form(rng, 1), random_form(rng, 1)
    F = wedge(n, a)
    assert jump_residual_F(F, KVector.zero(2), n).norm() < 1e-12
    assert jump_residual_G(hodge(F, m), KVector.zero(2), n, m).norm() < 1e-10
    F_bad = random_form(rng, 2)
    assert jump_residual_F(F_bad, KVector.zero(2), n).norm() > 1e-3
    assert jump_residual_G(hodge(F_bad, m), KVector.zero(2), n, m).norm() > 1e-3


def test_engineering_residuals_trivial(rng):
    n = np.array([0.0, 0.0, 1.0])
    z = np.zeros(3)
    res = engineering_jump_residuals(z, z, z, z, n, rng.normal(size=3))
    assert res[0] == 0.0 and not np.any(res[1]) and res[2] == 0.0 and not np.any(res[3])
    dE = np.array([0.4, -0.2, 0.0])
    res = engineering_jump_residuals(dE, z, z, z, n, z)
    assert np.array_equal(res[1], np.cross(n, dE))


def _form_vs_engineering(rng, n_vec, vel):
    """Engineering residuals against the 4d residuals with n = dXi for a moving plane."""
    # plane Xi = -n_vec . x + (n_vec . v) t  ->  dXi = ((n.v), -n_vec)
    n = KVector(1, np.concatenate([[n_vec @ vel], -n_vec]))
    dE, dB, dD, dH = (rng.normal(size=3) for _ in range(4))
    F = two_form_from_engineering(dE, dB)
    G = two_form_from_engineering(dD, dH)
    rF = jump_residual_F(F, KVector.zero(2), n)
    rG = jump_residual_G(G, KVector.zero(2), n, ETA)
    eng = engineering_jump_residuals(dE, dB, dD, dH, n_vec, vel)
    return rF, rG, eng


def test_engineering_matches_form_language(rng):
    for _ in range(100):
        n_vec = rng.normal(size=3)
        vel = rng.uniform(-0.5, 0.5, 3)
        rF, rG, (bB, faraday, dD, ampere) = _form_vs_engineering(rng, n_vec, vel)
        # [F] ^ n: th123 component carries n.[B]; the th0ij ones carry n x [E] - (n.v)[B]
        assert rF[1, 2, 3] == pytest.approx(bB, abs=1e-10)
        assert np.allclose([rF[0, 2, 3], rF[0, 3, 1], rF[0, 1, 2]], faraday, atol=1e-10)
        # [G] |_ n raised: time component n.[D], spatial ones (n.v)[D] + n x [H]
        up = ETA.raise_one_form(rG)
        assert up[0] == pytest.approx(dD, abs=1e-10)
        assert np.allclose(up[1:], ampere, atol=1e-10)


def test_wwe_engineering_residuals_vanish():
    cfg = WWEConfig(0.2, 0.5, 0.8, 5.0, 1.5, 2.0)
    sol = solve(cfg)
    E_o, B_o = engineering_from_2form(exterior_field(cfg))
    for rb in (cfg.r1, cfg.r2):
        E_i, B_i = engineering_from_2form(sol.F(rb))
        D_i, H_i = engineering_from_2form(sol.G(rb))
        res = engineering_jump_residuals(
            E_o - E_i, B_o - B_i, E_o - D_i, B_o - H_i, np.array([-1.0, 0, 0]), [0, cfg.omega * rb, 0]
        )
        assert abs(res[0]) < 1e-12 and np.max(np.abs(res[1])) < 1e-12
        assert abs(res[2]) < 1e-12 and np.max(np.abs(res[3])) < 1e-12


def test_kinematics_static_cylinder():
    r1, omega = 0.4, 0.7

    def xi(p):
        return math.hypot(p[1], p[2]) - r1

    def vel(p):
        return omega * np.array([-p[2], p[1], 0.0])

    b = MovingBoundary(xi, vel)
    p = np.array([0.3, r1 * math.cos(1.0), r1 * math.sin(1.0), 0.2])
    assert abs(boundary_kinematics_residual(b, p)) < 1e-9
    assert np.allclose(b.normal_spatial(p), -np.array([math.cos(1.0), math.sin(1.0), 0.0]), atol=1e-9)


def test_kinematics_expanding_sphere():
    R0, u, h = 1.0, 0.3, 1e-5

    def xi(p):
        return p[1] ** 2 + p[2] ** 2 + p[3] ** 2 - (R0 + u * p[0]) ** 2

    def vel(p):
        x = np.asarray(p[1:])
        return u * x / np.linalg.norm(x)

    b = MovingBoundary(xi, vel, h=h)
    t = 0.5
    R = R0 + u * t
    d = np.array([1.0, 2.0, -2.0]) / 3.0
    p = np.concatenate([[t], R * d])
    assert abs(boundary_kinematics_residual(b, p)) <= 10 * h * h
    # mismatched velocity is detected
    b_bad = MovingBoundary(xi, lambda p: 2.0 * vel(p), h=h)
    assert abs(boundary_kinematics_residual(b_bad, p)) > 0.1


def test_kinematics_off_boundary():
    b = MovingBoundary(lambda p: p[1] - 1.0, lambda p: np.zeros(3))
    with pytest.raises(ValueError, match="point not on boundary"):
        boundary_kinematics_residual(b, np.array([0.0, 1.1, 0.0, 0.0]))
