import numpy as np
import pytest

from wavelab import suite, verify
from wavelab.errors import DependencyError, InsufficientDataError, StencilError
from wavelab.verify import ResidualReport


def test_report_rejects_negative():
    with pytest.raises(ValueError):
        ResidualReport("x", "", None, -1.0, True)
    r = ResidualReport("x", "g", 0.1, 0.0, True)
    assert r.to_dict()["name"] == "x"


def test_richardson_and_romberg():
    levels = [1.0, 0.25, 0.0625]
    ratios, ok = verify.richardson(levels)
    assert ok and np.allclose(ratios, 4)
    assert not verify.richardson([1.0, 0.5, 0.25])[1]
    assert verify.richardson([1e-13, 2e-13])[1]
    with pytest.raises(InsufficientDataError):
        verify.richardson([1.0])
    # f(h) = 1 + h^2 + h^4 + h^6 is extrapolated exactly
    hs = [0.1 / 2**j for j in range(4)]
    vals = [np.array(1 + h**2 + h**4 + h**6) for h in hs]
    assert float(verify.romberg(vals)) == pytest.approx(1.0, abs=1e-15)


def test_residual_study_canonical(flow, canon):
    pts = suite.interior_grid(canon, 32, 32)
    reps = verify.residual_study(flow, pts)
    for r in reps:
        assert r.converged and r.passed, r
        assert all(3.5 <= q <= 4.5 for q in r.ratios)
        assert r.extrapolated < 1e-8


def test_residuals_see_a_velocity_fault(flow, canon):
    bad = verify.PerturbedField(flow, du=lambda x, z: 1e-3 * canon.c * np.sin(canon.k * np.asarray(x)))
    pts = suite.interior_grid(canon, 8, 8)
    reps = {r.name: r for r in verify.residual_study(bad, pts)}
    assert not reps["momentum_x"].passed
    assert not reps["continuity"].passed
    assert reps["continuity"].extrapolated == pytest.approx(1e-3, rel=1e-2)


def test_stencil_guard(flow, canon):
    with pytest.raises(StencilError):
        verify.euler_residual(flow, (np.array([0.0]), np.array([canon.crest - 1e-4])), step=1.0)


def test_boundary_suite(flow):
    reps = {r.name: r for r in verify.boundary_residuals(flow)}
    assert reps["surface_pressure"].passed and reps["kinematic"].passed
    for n in (2, 4, 8):
        r = reps[f"decay_{n}"]
        assert r.passed
        # the plain exponential underestimates the true bound
        assert r.extra["ratio_to_naive"] > 1


def test_isobaric_and_fault(flow, canon):
    lines = suite.streamline_samples(canon, 8, 32)
    sc = canon.consts.rho * canon.consts.g / canon.k
    assert verify.isobaric_check(flow, lines).worst < 1e-6 * sc
    eps = 1e-3 * sc
    assert verify.isobaric_check(verify.sheared_pressure(flow, eps), lines).worst > eps / 2
    with pytest.raises(InsufficientDataError):
        verify.isobaric_check(flow, [(np.zeros(3), np.zeros(3) - 50)])


def test_head_needs_profile(flow):
    with pytest.raises(DependencyError):
        verify.hydraulic_head(flow, (np.array([0.0]), np.array([-50.0])))


def test_head_constant_with_closed_form_primitive(flow, canon):
    from wavelab.gerstner import vorticity_primitive

    lines = suite.streamline_samples(canon, 6, 16)
    pts = (np.concatenate([x for x, _ in lines]), np.concatenate([z for _, z in lines]))
    H = verify.hydraulic_head(flow, pts, gamma_profile=lambda p: vorticity_primitive(p, canon))
    assert H.spread < 1e-10 * canon.c**2
