"""Vorticity primitive Gamma(p), its first integral and the derived K, T, beta."""

import math

import numpy as np
import pytest

from wavelab import gerstner as G
from wavelab.core import GerstnerParams, PhysicalConstants
from wavelab.errors import BlowUpError, BracketError, DomainError, ValidationError
from wavelab.gammaflow import (
    GammaConstants,
    K_and_T,
    T_prime,
    beta_log_form,
    beta_of_p,
    first_integral,
    gerstner_constants,
    implicit_residual,
    integrate_gamma,
    ode_coefficients,
    vorticity_of_gamma,
    vorticity_primitive,
)


@pytest.fixture(scope="module")
def chain(canon):
    gc = gerstner_constants(canon)
    b = np.linspace(canon.b0, canon.b0 - 6 / canon.k, 401)
    p = G.stream_p(b, canon)
    y0 = canon.c**2 * math.exp(2 * canon.k * canon.b0)
    prof = integrate_gamma(None, None, gc, p_out=p, gap0=y0, max_step=abs(p[-1]) / 1e4)
    return gc, b, prof


def test_coefficient_relations():
    A, B, C0, al = -0.3, 100.0, 12.0, 9.7
    c0, c1, c2, c3 = ode_coefficients(A, B, C0, al)
    assert c2 / c0 == pytest.approx(2 * A, rel=1e-15)
    assert c0 > 0
    with pytest.raises(DomainError):
        ode_coefficients(A, B, C0, 0.0)
    with pytest.raises(DomainError):
        ode_coefficients(0.0, B, C0, al)


def test_gerstner_bracket_width_is_c_squared(canon):
    gc = gerstner_constants(canon)
    assert gc.lower < gc.upper
    assert gc.width == pytest.approx(canon.c**2, rel=1e-12)
    assert gc.k == pytest.approx(canon.k, rel=1e-12)


def test_equilibrium_start_stays_put(canon):
    gc = gerstner_constants(canon)
    prof = integrate_gamma(gc.upper, (0.0, -gc.p_scale), gc, n_out=33)
    assert np.all(prof.gamma == 0)
    assert np.all(prof.Gamma == gc.upper)
    with pytest.raises(BracketError):
        first_integral(prof, gc)
    with pytest.raises(BracketError):
        implicit_residual(prof, gc)


@pytest.mark.parametrize("side", ["above", "below"])
def test_start_outside_bracket(canon, side):
    gc = gerstner_constants(canon)
    G0 = gc.upper + 1.0 if side == "above" else gc.lower - 1.0
    with pytest.raises(BracketError):
        integrate_gamma(G0, (0.0, -gc.p_scale), gc)


def test_wrong_sign_of_A_blows_up(canon):
    gc = gerstner_constants(canon)
    bad = GammaConstants.build(-gc.A, gc.B, gc.C0, gc.alpha)
    assert bad.width > 0
    with pytest.raises(BlowUpError):
        integrate_gamma(bad.upper - 0.5 * bad.width, (0.0, -20 * bad.p_scale), bad)


def test_first_integral_constant(canon, chain):
    gc, _, prof = chain
    C1, res = implicit_residual(prof, gc)
    assert res < 1e-10 * canon.c**2
    assert C1 == pytest.approx(gc.C1, rel=1e-12)


def test_vorticity_sign_and_decay(canon, chain):
    gc, b, prof = chain
    assert np.all(prof.gamma < 0)
    # gamma' < 0 means |gamma| grows towards the surface (p = 0)
    assert np.all(np.diff(prof.gamma) > 0)
    assert abs(prof.gamma[-1]) < 1e-4 * canon.k * canon.c


def test_K_and_T_match_labels(canon, chain):
    gc, b, prof = chain
    K, T = K_and_T(prof, gc, canon)
    L = 1 / canon.k
    assert np.max(np.abs(K - np.exp(canon.k * b) / canon.k)) < 1e-9 * L
    assert np.max(np.abs(T - b)) < 1e-9 * L


def test_K_and_T_rejects_other_wave(canon, chain):
    gc, _, prof = chain
    other = GerstnerParams.from_wavenumber(0.02, b0=-10.0)
    with pytest.raises(ValidationError):
        K_and_T(prof, gc, other)


def test_vorticity_matches_closed_form(canon, chain):
    gc, b, prof = chain
    want = G.streamline_vorticity(b, canon)
    assert np.max(np.abs(vorticity_of_gamma(prof.Gamma, gc) / want - 1)) < 1e-8
    assert np.max(np.abs(prof.gamma / want - 1)) < 1e-9


def test_T_prime_matches_label_slope(canon, chain):
    gc, b, prof = chain
    # db/dp = 1 / (dp/db)
    want = 1.0 / (-canon.c * np.expm1(2 * canon.k * b))
    got = T_prime(prof, gc)
    assert np.max(np.abs(got / want - 1)) < 1e-8


def test_T_prime_matches_finite_difference(canon):
    gc = gerstner_constants(canon)
    y0 = canon.c**2 * math.exp(2 * canon.k * canon.b0)
    p = np.linspace(-0.5, -3.0, 6) * gc.p_scale
    h = 1e-3 * gc.p_scale
    nodes = np.concatenate([[0.0], np.ravel(np.column_stack([p + h, p, p - h]))])
    prof = integrate_gamma(None, None, gc, p_out=nodes, gap0=y0)
    Tp, T0, Tm = prof.T[1:].reshape(-1, 3).T
    fd = (Tp - Tm) / (2 * h)
    exact = T_prime(prof, gc)[1:].reshape(-1, 3)[:, 1]
    assert np.max(np.abs(fd / exact - 1)) < 1e-6


def test_beta_is_linear_in_T(canon, chain):
    gc, _, prof = chain
    beta = beta_of_p(prof, gc)
    slope = np.gradient(beta, prof.T, edge_order=2)
    assert np.max(np.abs(slope / -gc.A - 1)) < 1e-4
    # and exactly: beta'(p) / T'(p) = -A
    dbeta = gc.A / (2 * gc.alpha) * prof.gamma + gc.A**2 / gc.alpha
    assert np.max(np.abs(dbeta / T_prime(prof, gc) / -gc.A - 1)) < 1e-10


def test_beta_forms_agree(canon, chain):
    gc, _, prof = chain
    lin = beta_of_p(prof, gc)
    log = beta_log_form(prof, gc)
    assert np.max(np.abs(lin - log)) < 1e-9 * canon.c
    with pytest.raises(DomainError):
        beta_log_form(prof, gc.with_C1(math.nan))


def test_rk4_is_fourth_order():
    # deep enough that the near-pole step limit never engages
    prm = GerstnerParams.from_wavenumber(0.01, b0=-100.0)
    gc = gerstner_constants(prm)
    b = np.linspace(prm.b0, prm.b0 - 3 / prm.k, 7)
    p = G.stream_p(b, prm)
    exact = prm.c**2 * np.exp(2 * prm.k * b)
    y0 = exact[0]
    errs = []
    for n in (4, 8, 16, 32):
        prof = integrate_gamma(None, None, gc, p_out=p, gap0=y0, max_step=gc.p_scale / n)
        errs.append(np.max(np.abs(prof.gap - exact)))
    ratios = np.array(errs[:-1]) / np.array(errs[1:])
    assert np.all((ratios > 12) & (ratios < 20)), ratios


def test_zero_rotation_limit():
    prm = GerstnerParams.from_wavenumber(0.05, b0=-4.0, consts=PhysicalConstants(omega=0.0))
    gc = gerstner_constants(prm)
    assert gc.alpha == prm.consts.g
    assert gc.width == pytest.approx(prm.c**2, rel=1e-12)
    b = np.linspace(prm.b0, prm.b0 - 5 / prm.k, 65)
    p = G.stream_p(b, prm)
    prof = integrate_gamma(None, None, gc, p_out=p, gap0=prm.c**2 * math.exp(2 * prm.k * prm.b0))
    assert implicit_residual(prof, gc)[1] < 1e-10 * prm.c**2
    assert np.max(np.abs(prof.T - b)) < 1e-9 / prm.k


def test_primitive_matches_closed_form(canon):
    gc = gerstner_constants(canon)
    y0 = canon.c**2 * math.exp(2 * canon.k * canon.b0)
    G0 = gc.upper - y0
    prim = vorticity_primitive(gc, G0, -G0)
    p = np.array([[-10.0, -250.0], [-1000.0, -10.0]])
    want = G.vorticity_primitive(p, canon)
    assert np.max(np.abs(prim(p) - want)) < 1e-9 * canon.c**2
    assert prim(np.array([0.0]))[0] == pytest.approx(0.0, abs=1e-12 * canon.c**2)
    with pytest.raises(DomainError):
        prim(np.array([1.0]))
