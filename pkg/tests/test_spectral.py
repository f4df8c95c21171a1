"""Transforms, norms, and dealiased products against quadrature/closed-form oracles."""

import numpy as np
import pytest

from tdgl_bcsbec.spectral import (
    BoxDomain,
    GridField,
    SpectralField,
    analyze,
    cubic_term,
    gradient_values,
    inner,
    l4_norm4,
    mixed_grad_sq_integral,
    norms,
    quadrature_l2,
    synthesize,
)


def random_field(domain, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    c = rng.normal(size=domain.n_modes) + 1j * rng.normal(size=domain.n_modes)
    return SpectralField(domain, scale * c)


def dense_quadrature(fn, L, n=200_000):
    """Plain midpoint rule on (0, L) — independent reference for every integral here."""
    x = (np.arange(n) + 0.5) * (L / n)
    return np.sum(fn(x)) * (L / n)


@pytest.fixture(scope="module")
def dom():
    return BoxDomain(dim=1, lengths=np.pi, modes=16, grid=64)


def test_domain_invariants(dom):
    lam = dom.eigenvalues()
    assert np.all(lam > 0)
    assert np.all(np.diff(lam) >= 0)
    with pytest.raises(ValueError):
        BoxDomain(dim=1, lengths=np.pi, modes=16, grid=32)  # below 4*l
    with pytest.raises(ValueError):
        BoxDomain(dim=1, lengths=-1.0, modes=4)


def test_synthesize_zero_and_unit_mode(dom):
    z = synthesize(SpectralField.zero(dom))
    assert np.all(z.values == 0)
    # first basis function at x = pi/2 equals sqrt(2/pi) sin(pi/2)
    e1 = SpectralField.unit_mode(dom, 0)
    u = synthesize(e1, 64)
    k_mid = 32  # x = 32*pi/64 = pi/2
    assert abs(u.values[k_mid - 1] - np.sqrt(2 / np.pi)) < 1e-14


def test_round_trip_random(dom):
    w = random_field(dom, 7)
    back = analyze(synthesize(w))
    assert np.max(np.abs(back.coeffs - w.coeffs)) < 1e-12 * np.max(np.abs(w.coeffs))


def test_analyze_pure_sine_orthogonality(dom):
    # samples of sin(2x) on (0, pi) hit only mode j=2
    x = dom.nodes(0)
    u = GridField(dom, (64,), np.sin(2 * x).astype(np.complex128))
    w = analyze(u, 8)
    expected = np.sqrt(np.pi / 2)  # <sin 2x, sqrt(2/pi) sin 2x> = sqrt(pi/2)
    assert abs(w.coeffs[1] - expected) < 1e-12
    mask = np.ones(dom.n_modes, dtype=bool)
    mask[1] = False
    assert np.max(np.abs(w.coeffs[mask])) < 1e-12


def test_synthesize_resolution_too_small(dom):
    with pytest.raises(ValueError):
        synthesize(random_field(dom, 1), 16)
    with pytest.raises(ValueError):
        analyze(synthesize(random_field(dom, 1)), 40)


def test_norms_unit_modes(dom):
    n1 = norms(SpectralField.unit_mode(dom, 0))
    assert abs(n1.l2 - 1) < 1e-14 and abs(n1.grad - 1) < 1e-14
    assert abs(n1.lap - 1) < 1e-14 and abs(n1.hminus1 - 1) < 1e-14
    n3 = norms(SpectralField.unit_mode(dom, 2))
    assert abs(n3.grad**2 - 9) < 1e-13


def grad_trapezoid_sq(w, n):
    """Trapezoid of |w'|^2 including the nonzero cosine-series endpoint values."""
    L = w.domain.lengths[0]
    g = gradient_values(w, n)[0]
    j = np.arange(1, w.domain.n_modes + 1)
    b = w.coeffs * np.sqrt(2 / L) * (j * np.pi / L)
    end0, end1 = np.sum(b), np.sum(b * (-1.0) ** j)
    return (np.sum(np.abs(g) ** 2) + 0.5 * (abs(end0) ** 2 + abs(end1) ** 2)) * (L / n)


def test_grad_norm_against_grid_quadrature(dom):
    w = random_field(dom, 3)
    quad = grad_trapezoid_sq(w, 512)
    assert abs(quad - norms(w).grad ** 2) < 1e-8 * max(1.0, norms(w).grad ** 2)


def test_parseval(dom):
    w = random_field(dom, 11)
    u = synthesize(w, 8 * 16)
    assert abs(quadrature_l2(u) - norms(w).l2) < 1e-10


def test_norm_homogeneity_and_triangle(dom):
    rng = np.random.default_rng(5)
    for _ in range(10):
        w1 = random_field(dom, rng.integers(1 << 30))
        w2 = random_field(dom, rng.integers(1 << 30))
        s = complex(rng.normal(), rng.normal())
        for attr in ("l2", "grad", "lap", "hminus1", "h1", "h2"):
            nw = getattr(norms(w1), attr)
            assert abs(getattr(norms(w1 * s), attr) - abs(s) * nw) < 1e-10 * (1 + abs(s) * nw)
            assert getattr(norms(w1 + w2), attr) <= getattr(norms(w1), attr) + getattr(norms(w2), attr) + 1e-12


def test_poincare_chain(dom):
    w = random_field(dom, 13)
    n = norms(w)
    lam1 = dom.eigenvalues()[0]
    assert n.hminus1 <= n.l2 / np.sqrt(lam1) + 1e-12
    assert n.l2 / np.sqrt(lam1) <= n.grad / lam1 + 1e-12


def test_young_bound_random_fields(dom):
    # |w|^2 <= k4 |w|_L4^4 + |Omega|/(4 k4) holds pointwise, hence for every field
    rng = np.random.default_rng(17)
    for _ in range(20):
        w = random_field(dom, rng.integers(1 << 30), scale=rng.uniform(0.01, 10))
        for k4 in (0.1, 1.0, 7.5):
            assert norms(w).l2 ** 2 <= k4 * l4_norm4(w) + dom.volume / (4 * k4) + 1e-10


def test_l4_closed_form_and_scaling(dom):
    assert l4_norm4(SpectralField.zero(dom)) == 0.0
    # integral of (2/pi)^2 sin^4 over (0, pi) = 3/(2 pi)
    e1 = SpectralField.unit_mode(dom, 0)
    assert abs(l4_norm4(e1) - 3 / (2 * np.pi)) < 1e-13
    ref = dense_quadrature(lambda x: (2 / np.pi) ** 2 * np.sin(x) ** 4, np.pi)
    assert abs(l4_norm4(e1) - ref) < 1e-9
    w = random_field(dom, 23)
    assert abs(l4_norm4(2 * w) - 16 * l4_norm4(w)) < 1e-10 * l4_norm4(2 * w)


def test_cubic_term_zero_real_conjugate(dom):
    assert np.all(cubic_term(SpectralField.zero(dom)).coeffs == 0)
    v_real = SpectralField(dom, np.linspace(1, 0.1, dom.n_modes).astype(complex))
    out = cubic_term(v_real)
    assert np.max(np.abs(out.coeffs.imag)) < 1e-13
    v = random_field(dom, 29)
    conj_out = cubic_term(SpectralField(dom, np.conj(v.coeffs)))
    assert np.max(np.abs(conj_out.coeffs - np.conj(cubic_term(v).coeffs))) < 1e-12


def test_cubic_term_against_dense_quadrature(dom):
    # <|v|^2 v, basis_j> by midpoint quadrature on a fine independent grid
    v = random_field(dom, 31)
    x = (np.arange(100_000) + 0.5) * (np.pi / 100_000)
    vals = np.zeros_like(x, dtype=complex)
    for j in range(dom.n_modes):
        vals += v.coeffs[j] * np.sqrt(2 / np.pi) * np.sin((j + 1) * x)
    cubed = np.abs(vals) ** 2 * vals
    out = cubic_term(v)
    for j in (0, 1, 5, 15):
        ref = np.sum(cubed * np.sqrt(2 / np.pi) * np.sin((j + 1) * x)) * (np.pi / 100_000)
        assert abs(out.coeffs[j] - ref) < 1e-8 * (1 + abs(ref))


def test_cubic_single_mode_mode3_coefficient(dom):
    # sin^3 x = (3 sin x - sin 3x)/4: modes 1 and 3 only, coefficients 3/(2 pi), -1/(2 pi)
    out = cubic_term(SpectralField.unit_mode(dom, 0))
    assert abs(out.coeffs[0] - 3 / (2 * np.pi)) < 1e-13
    assert abs(out.coeffs[2] + 1 / (2 * np.pi)) < 1e-13
    mask = np.ones(dom.n_modes, dtype=bool)
    mask[[0, 2]] = False
    assert np.max(np.abs(out.coeffs[mask])) < 1e-13


def test_mixed_grad_sq_integral(dom):
    assert mixed_grad_sq_integral(SpectralField.zero(dom)) == 0.0
    e1 = SpectralField.unit_mode(dom, 0)
    # integral (2/pi)^2 cos^2 sin^2 over (0, pi) = 1/(2 pi)
    assert abs(mixed_grad_sq_integral(e1) - 1 / (2 * np.pi)) < 1e-13
    ref = dense_quadrature(lambda x: (2 / np.pi) ** 2 * np.cos(x) ** 2 * np.sin(x) ** 2, np.pi)
    assert abs(mixed_grad_sq_integral(e1) - ref) < 1e-9
    w = random_field(dom, 37)
    s = 1.7 - 0.3j
    assert abs(mixed_grad_sq_integral(w * s) - abs(s) ** 4 * mixed_grad_sq_integral(w)) < 1e-9 * (
        1 + mixed_grad_sq_integral(w)
    )


def test_inner_is_complex_l2_pairing(dom):
    w1, w2 = random_field(dom, 41), random_field(dom, 43)
    u1, u2 = synthesize(w1, 256), synthesize(w2, 256)
    quad = np.sum(u1.values * np.conj(u2.values)) * (np.pi / 256)
    assert abs(inner(w1, w2) - quad) < 1e-10


def test_domain_mismatch_rejected(dom):
    other = BoxDomain(dim=1, lengths=2.0, modes=16, grid=64)
    with pytest.raises(ValueError):
        _ = random_field(dom, 1) + random_field(other, 1)


def test_nonfinite_coefficients_rejected(dom):
    c = np.zeros(dom.n_modes, dtype=complex)
    c[0] = np.nan
    with pytest.raises(ValueError):
        SpectralField(dom, c)


@pytest.fixture(scope="module")
def dom2():
    return BoxDomain(dim=2, lengths=(np.pi, 2.0), modes=(6, 5), grid=(24, 20))


class Test2D:
    def test_mode_ordering(self, dom2):
        lam = dom2.eigenvalues()
        assert np.all(np.diff(lam) >= -1e-12)
        assert len(lam) == 30

    def test_round_trip(self, dom2):
        w = random_field(dom2, 47)
        back = analyze(synthesize(w))
        assert np.max(np.abs(back.coeffs - w.coeffs)) < 1e-12

    def test_parseval_and_l4(self, dom2):
        w = random_field(dom2, 53)
        assert abs(quadrature_l2(synthesize(w)) - norms(w).l2) < 1e-10
        # first mode of the 2-D box: product of two 1-D quartic integrals
        e1 = SpectralField.unit_mode(dom2, 0)
        ref = (3 / (2 * np.pi)) * ((2.0 / 2.0) ** 2 * 2.0 * 3.0 / 8.0)  # (2/L2)^2 * L2 * 3/8
        assert abs(l4_norm4(e1) - ref) < 1e-12

    def test_gradient_values_pointwise(self, dom2):
        # direct slow evaluation of both partials at a few interior nodes
        w = random_field(dom2, 59)
        g = gradient_values(w)
        table = dom2.mode_table()
        L1, L2 = dom2.lengths
        N1, N2 = dom2.grid
        scale = np.sqrt(2 / L1) * np.sqrt(2 / L2)
        for k1, k2 in [(1, 1), (5, 7), (11, 3)]:
            x1, x2 = k1 * L1 / N1, k2 * L2 / N2
            d1 = d2 = 0.0
            for c, (j1, j2) in zip(w.coeffs, table):
                d1 += c * scale * (j1 * np.pi / L1) * np.cos(j1 * np.pi * x1 / L1) * np.sin(j2 * np.pi * x2 / L2)
                d2 += c * scale * (j2 * np.pi / L2) * np.sin(j1 * np.pi * x1 / L1) * np.cos(j2 * np.pi * x2 / L2)
            assert abs(g[0][k1 - 1, k2 - 1] - d1) < 1e-11
            assert abs(g[1][k1 - 1, k2 - 1] - d2) < 1e-11
