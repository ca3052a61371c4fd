import math

import numpy as np
import pytest

from wavelab import hodograph as H
from wavelab.errors import InsufficientDataError, ModelViolationError
from wavelab.gammaflow import GammaConstants, gerstner_constants
from wavelab.gerstner import LagrangianLabel, label_of_p, position, stream_p, streamline_vorticity
from wavelab.verify import PerturbedField

from oracles import symbolic_cubic


@pytest.fixture(scope="module")
def prof(flow):
    return H.extract_profiles(flow)


@pytest.fixture(scope="module")
def records(flow, canon, prof):
    q = np.linspace(0, canon.wavelength, 12, endpoint=False)
    return H.hodograph_records(q, prof, flow, constants=GammaConstants.from_profiles(prof))


def test_stream_function_quadrature(flow, canon):
    lbl = LagrangianLabel(np.array([20.0, 310.0]), np.array([-40.0, -260.0]))
    x, z = position(0.0, lbl, canon)
    psi = H.stream_function((x, z), flow)
    assert np.allclose(psi, -stream_p(lbl.b, canon), rtol=1e-11, atol=1e-9)


def test_height_function_finds_streamlines(flow, canon):
    b = np.array([-10.0, -75.0, -400.0])
    lbl = LagrangianLabel(np.array([0.0, 120.0, 400.0]), b)
    x, z = position(0.0, lbl, canon)
    hs = H.height_function(x, stream_p(b, canon), flow)
    assert np.allclose(hs.h, z, atol=1e-9)
    u, w = flow.velocity(x, z)
    assert np.allclose(hs.h_p, 1 / (canon.c - u))


def test_profile_constants(prof, canon):
    gc = gerstner_constants(canon)
    c = canon.c
    assert prof.A == pytest.approx(-canon.k * c, rel=1e-10)
    assert prof.B == pytest.approx(canon.consts.p_atm / canon.consts.rho, rel=1e-12)
    assert prof.C0 == pytest.approx(gc.C0, abs=1e-10 * c)
    assert prof.fit_residual < 1e-10 * c * c
    b = label_of_p(prof.p, canon)
    err = np.abs(prof.gamma - streamline_vorticity(b, canon)) / (canon.k * c)
    assert err.max() < 1e-9


def test_identities_on_records(records, prof, canon):
    c, k = canon.c, canon.k
    assert H.check_has(records, prof).max() < 1e-8 * c
    assert H.beta_spread(records, prof).max() < 1e-8 * c
    assert H.bernoulli_residual(records, prof).max() < 1e-8 * c * c
    gc = GammaConstants.from_profiles(prof)
    circ = H.circle_identity(records, gc)
    assert circ.radial_deviation.max() < 1e-8 / k
    # the circle radius is the orbit radius of the streamline
    b = label_of_p(records.p, canon)
    assert np.allclose(records.K, np.exp(k * b) / k, rtol=1e-9)


def test_cubic_matches_symbolic_oracle(prof, canon):
    fns = symbolic_cubic()
    assert len(fns) == 4
    args = (prof.alpha, prof.Q, prof.Q_p, prof.Q_pp, prof.beta, prof.beta_p, prof.Gamma, prof.gamma)
    oracle = [np.broadcast_to(f(*args), prof.p.shape) for f in fns]
    ours = H.cubic_coefficients(prof)
    U, L = canon.c, 1 / canon.k
    for j, (a, o) in enumerate(zip(ours, oracle)):
        unit = U**3 / L ** (j + 1)
        assert np.max(np.abs(a - o)) / unit < 1e-11
    nd = H.nondimensional_coefficients(ours, U, L)
    assert max(np.max(np.abs(a)) for a in nd) < 1e-6


def test_cubic_random_values_factorise(rng):
    """(Q' h + beta) times the quadratic, for arbitrary profile values."""
    vals = rng.normal(size=8)
    prof = H.Profiles(
        p=np.zeros(1), Q=vals[[0]], Q_p=vals[[1]], Q_pp=vals[[2]], beta=vals[[3]], beta_p=vals[[4]],
        Gamma=vals[[5]], gamma=vals[[6]], A=1.0, B=0.0, C=0.0, C0=0.0, alpha=vals[7], fit_residual=0.0, q0=0.0,
    )
    a = H.cubic_coefficients(prof)
    b0, b1, b2 = H.reduced_coefficients(prof)
    D1, D0 = prof.Q_p, prof.beta
    assert np.allclose([a[3], a[2], a[1], a[0]], [D1 * b2, D1 * b1 + D0 * b2, D1 * b0 + D0 * b1, D0 * b0])
    fns = symbolic_cubic()
    args = (prof.alpha, *(v[0] for v in (prof.Q, prof.Q_p, prof.Q_pp, prof.beta, prof.beta_p, prof.Gamma, prof.gamma)))
    assert np.allclose([f(*args) for f in fns], [x[0] for x in a], rtol=1e-12, atol=1e-12)


def test_crest_shift_is_zero(flow, canon):
    p = stream_p(np.array([-10.0, -60.0, -250.0]), canon)
    d = H.crest_shift(p, flow)
    assert np.max(np.abs(d)) * canon.k < 1e-8


def test_height_pde(flow, canon, prof):
    b = np.array([-60.0, -150.0])
    p = stream_p(b, canon)
    q = np.array([40.0, 250.0])
    hfun = lambda qq, pp: H.height_function(qq, pp, flow).h  # noqa: E731
    gp = streamline_vorticity(b, canon)
    r = H.height_pde_residual(q, p, hfun, gp, dq=0.5, dp=0.5)
    # each term is of size gamma h_p^3 ~ k / c^2
    unit = canon.k / canon.c**2
    assert np.max(np.abs(r)) < 1e-4 * unit
    wrong = H.height_pde_residual(q, p, hfun, -gp, dq=0.5, dp=0.5)
    assert np.max(np.abs(wrong)) > 1e-2 * unit


def test_too_few_samples(flow):
    with pytest.raises(InsufficientDataError):
        H.extract_profiles(flow, p_samples=np.linspace(-100, 0, 5))


def test_nonlinear_Q_rejected(flow, canon):
    sc = canon.consts.rho * canon.consts.g / canon.k
    bad = PerturbedField(flow, dP=lambda x, z: 1e-3 * sc * np.cos(canon.k * np.asarray(z)))
    with pytest.raises(ModelViolationError):
        H.extract_profiles(bad, n=32)


def test_nondimensional_scaling():
    c = H.CubicCoeffs(1.0, 1.0, 1.0, 1.0)
    nd = H.nondimensional_coefficients(c, 2.0, 10.0)
    assert [float(v) for v in nd] == [10 / 8, 100 / 8, 1000 / 8, 10000 / 8]
    assert math.isfinite(float(nd.a3))
