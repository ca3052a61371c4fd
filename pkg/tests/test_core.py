import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wavelab.core import (
    FreeSurfaceSpec,
    GerstnerParams,
    PhysicalConstants,
    derive_constants,
    dispersion_defect,
    dispersion_speed,
)
from wavelab.errors import DomainError, ValidationError

from oracles import bisect_speed


def test_canonical_speed():
    c = dispersion_speed(0.01, PhysicalConstants())
    assert c == pytest.approx(31.2977, abs=5e-5)


def test_classical_limit():
    consts = PhysicalConstants(omega=0.0)
    assert dispersion_speed(1.0, consts) == pytest.approx(math.sqrt(9.8), rel=1e-15)


@settings(max_examples=200, deadline=None)
@given(k=st.floats(1e-3, 10.0), omega=st.floats(0.0, 1e-3))
def test_dispersion_against_bisection(k, omega):
    consts = PhysicalConstants(omega=omega)
    c = dispersion_speed(k, consts)
    assert abs(dispersion_defect(k, c, consts)) < 1e-10
    assert c == pytest.approx(bisect_speed(k, consts), rel=1e-12)


def test_rationalised_form_survives_large_rotation():
    consts = PhysicalConstants(omega=1e3)
    c = dispersion_speed(1e-6, consts)
    assert abs(dispersion_defect(1e-6, c, consts)) < 1e-12
    assert c > 0


@pytest.mark.parametrize("k", [0.0, -1.0, float("nan")])
def test_bad_wavenumber(k):
    with pytest.raises(DomainError, match="wavenumber must be positive"):
        dispersion_speed(k, PhysicalConstants())


def test_derived_constants(canon):
    A, alpha, m = derive_constants(canon.k, canon.c, canon.consts)
    assert A == -canon.k * canon.c
    assert alpha == pytest.approx(9.8 - 2 * 7.3e-5 * canon.c)
    assert m == pytest.approx(canon.c, rel=1e-14)
    assert A * A / alpha == pytest.approx(canon.k, rel=1e-14)


def test_inconsistent_speed_rejected(canon):
    with pytest.raises(ValidationError):
        derive_constants(canon.k, canon.c * 1.001, canon.consts)
    with pytest.raises(ValidationError):
        GerstnerParams(k=canon.k, b0=-10.0, h0=0.0, c=canon.c, A=canon.A * 1.01, alpha=canon.alpha, m=canon.m)


def test_params_validation():
    with pytest.raises(DomainError):
        GerstnerParams.from_wavenumber(0.01, b0=1.0)
    cyc = GerstnerParams.from_wavenumber(0.01, b0=0.0)
    assert cyc.is_cusped
    assert cyc.crest - cyc.trough == pytest.approx(2 / 0.01)


def test_constants_validation():
    for kw in ({"g": 0.0}, {"rho": -1.0}, {"omega": -1e-5}):
        with pytest.raises(DomainError):
            PhysicalConstants(**kw)


def test_free_surface_spec():
    with pytest.raises(DomainError):
        FreeSurfaceSpec(d=-1.0)
    with pytest.raises(DomainError):
        FreeSurfaceSpec(p0=0.0)
    assert FreeSurfaceSpec(0.0, 10.0, 3.0).d == 10.0


def test_period_and_wavelength():
    prm = GerstnerParams.from_wavenumber(1.0, consts=PhysicalConstants(omega=0.0))
    assert prm.period == pytest.approx(2 * math.pi / math.sqrt(9.8))
    assert prm.wavelength == pytest.approx(2 * math.pi)
    assert np.isclose(prm.c, 3.130495168, atol=1e-8)
