"""Parameter admissibility and the v = u + g*phi change of variables."""

import numpy as np
import pytest

from tdgl_bcsbec.model import (
    Forcing,
    PhysParams,
    from_original_variables,
    to_original_variables,
    validate_params,
)
from tdgl_bcsbec.spectral import BoxDomain, SpectralField


@pytest.fixture(scope="module")
def dom():
    return BoxDomain(dim=1, lengths=np.pi, modes=8, grid=32)


def rand_field(dom, seed):
    rng = np.random.default_rng(seed)
    return SpectralField(dom, rng.normal(size=dom.n_modes) + 1j * rng.normal(size=dom.n_modes))


def test_validate_default_set():
    report = validate_params(PhysParams(U=1, a=0, b=1, c=1, m=0.25, gamma=0.5, d_r=0, d_i=1))
    assert report.ok and not report.violations
    assert report.derived["one_over_U_minus_a"] == 1.0
    assert abs(report.derived["inv_d"] - (-1j)) < 1e-15  # 1/i = -i


def test_validate_au_constraint():
    report = validate_params(PhysParams(U=1, a=2))
    assert not report.ok
    assert any("a*U" in v for v in report.violations)


def test_validate_di_constraint():
    report = validate_params(PhysParams(d_i=0.0))
    assert not report
    assert any("d_i" in v for v in report.violations)


def test_validate_positivity():
    for kw in ({"U": -1}, {"b": 0}, {"c": -2}, {"m": 0}, {"gamma": 0}):
        assert not validate_params(PhysParams(**kw)).ok


def test_parabolicity_of_explicit_v_equation():
    # Re of the Laplacian coefficient (i c/4m)/d equals (c/4m) d_i/|d|^2 > 0
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = PhysParams(
            U=rng.uniform(0.1, 5),
            a=rng.uniform(-2, 0.5),
            b=rng.uniform(0.1, 3),
            c=rng.uniform(0.1, 3),
            m=rng.uniform(0.1, 2),
            g=rng.normal(),
            gamma=rng.uniform(0.05, 2),
            d_r=rng.normal(),
            d_i=rng.uniform(0.05, 3),
        )
        if not validate_params(p).ok:
            continue
        coeff = (1j * p.c / (4 * p.m)) * p.inv_d
        expected = (p.c / (4 * p.m)) * p.d_i / abs(p.d) ** 2
        assert abs(coeff.real - expected) < 1e-14
        assert coeff.real > 0


def test_change_of_variables_identity_cases(dom):
    v, phi = rand_field(dom, 1), rand_field(dom, 2)
    u, phi_out = to_original_variables(v, phi, g=0.0)
    assert np.array_equal(u.coeffs, v.coeffs)
    assert phi_out is phi
    g = 1.3
    u2, _ = to_original_variables(SpectralField(dom, g * phi.coeffs), phi, g=g)
    assert np.max(np.abs(u2.coeffs)) < 1e-14


def test_change_of_variables_round_trip(dom):
    v, phi = rand_field(dom, 3), rand_field(dom, 4)
    g = 1.7
    u, _ = to_original_variables(v, phi, g)
    v_back, phi_back = from_original_variables(u, phi, g)
    assert np.max(np.abs(v_back.coeffs - v.coeffs)) < 1e-14 * np.max(np.abs(v.coeffs))
    assert np.array_equal(phi_back.coeffs, phi.coeffs)


def test_change_of_variables_domain_mismatch(dom):
    other = BoxDomain(dim=1, lengths=1.0, modes=8, grid=32)
    with pytest.raises(ValueError):
        to_original_variables(rand_field(dom, 5), rand_field(other, 6), 1.0)


def test_forcing_constructors(dom):
    z = Forcing.zero(dom)
    assert z.is_zero
    F = Forcing.from_modes(dom, f_modes={1: 0.5 + 0.25j}, h_modes={3: -1.0})
    assert F.f.coeffs[0] == 0.5 + 0.25j and F.h.coeffs[2] == -1.0
    assert not F.is_zero
    with pytest.raises(ValueError):
        Forcing.from_modes(dom, f_modes={99: 1.0})
