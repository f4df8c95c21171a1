"""Dirichlet sine eigenbasis on a box: transforms, diagonal norms, dealiased products.

The discretization works in the orthonormal eigenbasis of -Laplace with
homogeneous Dirichlet conditions on (0, L1) x ... : in 1-D

    w_j(x) = sqrt(2/L) sin(j pi x / L),    lambda_j = (j pi / L)^2,

so that every Sobolev-scale norm is a plain weighted l2 sum of coefficients.
Pointwise (cubic) products are evaluated pseudospectrally on a padded uniform
grid; with grid >= 4*modes per axis the quadrature and the Galerkin projection
of |v|^2 v are exact for the resolved band (no aliasing error at all, because
the odd periodic extension of any product of resolved fields stays below the
grid Nyquist band).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.fft import dct, dst


def _as_tuple(value, dim: int, name: str) -> tuple:
    if np.isscalar(value):
        return (value,) * dim
    t = tuple(value)
    if len(t) != dim:
        raise ValueError(f"{name} must have {dim} entries, got {len(t)}")
    return t


@dataclass(frozen=True)
class BoxDomain:
    """Box (0,L1)[x(0,L2)] with the first `modes` sine eigenfunctions per axis.

    `grid` is the number of uniform subintervals per axis used for quadrature
    and pseudospectral products (interior nodes x_k = k L/N, k=1..N-1).
    """

    dim: int
    lengths: tuple[float, ...]
    modes: tuple[int, ...]
    grid: tuple[int, ...]
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __init__(self, dim=1, lengths=np.pi, modes=64, grid=None):
        if dim not in (1, 2):
            raise ValueError("dim must be 1 or 2")
        lengths = tuple(float(L) for L in _as_tuple(lengths, dim, "lengths"))
        modes = tuple(int(l) for l in _as_tuple(modes, dim, "modes"))
        if grid is None:
            grid = tuple(4 * l for l in modes)
        grid = tuple(int(N) for N in _as_tuple(grid, dim, "grid"))
        for L in lengths:
            if not L > 0:
                raise ValueError("lengths must be positive")
        for l in modes:
            if l < 1:
                raise ValueError("modes must be >= 1 per axis")
        for N, l in zip(grid, modes):
            if N < 4 * l:
                raise ValueError(f"grid {N} < 4*modes {4 * l}: not enough dealiasing headroom")
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "modes", modes)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "_cache", {})

    @property
    def n_modes(self) -> int:
        n = 1
        for l in self.modes:
            n *= l
        return n

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    def axis_eigenvalues(self, axis: int) -> np.ndarray:
        j = np.arange(1, self.modes[axis] + 1)
        return (j * np.pi / self.lengths[axis]) ** 2

    def mode_table(self) -> np.ndarray:
        """Per-axis indices of the active modes in canonical order, shape (n_modes, dim).

        Canonical order: nondecreasing total eigenvalue, ties broken by the
        first-axis index, then the second.
        """
        key = "mode_table"
        if key not in self._cache:
            if self.dim == 1:
                table = np.arange(1, self.modes[0] + 1)[:, None]
            else:
                j1, j2 = np.meshgrid(
                    np.arange(1, self.modes[0] + 1),
                    np.arange(1, self.modes[1] + 1),
                    indexing="ij",
                )
                pairs = np.stack([j1.ravel(), j2.ravel()], axis=1)
                lam = (pairs[:, 0] * np.pi / self.lengths[0]) ** 2 + (
                    pairs[:, 1] * np.pi / self.lengths[1]
                ) ** 2
                order = np.lexsort((pairs[:, 1], pairs[:, 0], lam))
                table = pairs[order]
            self._cache[key] = table
        return self._cache[key]

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues of -Laplace for the active modes, canonical order."""
        key = "eigenvalues"
        if key not in self._cache:
            table = self.mode_table()
            lam = np.zeros(len(table))
            for ax in range(self.dim):
                lam += (table[:, ax] * np.pi / self.lengths[ax]) ** 2
            self._cache[key] = lam
        return self._cache[key]

    def nodes(self, axis: int, resolution: int | None = None) -> np.ndarray:
        N = self.grid[axis] if resolution is None else resolution
        return np.arange(1, N) * (self.lengths[axis] / N)

    def quadrature_weight(self, resolution=None) -> float:
        res = self.grid if resolution is None else _as_tuple(resolution, self.dim, "resolution")
        w = 1.0
        for L, N in zip(self.lengths, res):
            w *= L / N
        return w


@dataclass(frozen=True)
class SpectralField:
    """Complex coefficients over the active modes of a BoxDomain (canonical order)."""

    domain: BoxDomain
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.domain.n_modes,):
            raise ValueError(f"expected {self.domain.n_modes} coefficients, got {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, domain: BoxDomain) -> "SpectralField":
        return cls(domain, np.zeros(domain.n_modes, dtype=np.complex128))

    @classmethod
    def unit_mode(cls, domain: BoxDomain, index: int, amplitude=1.0) -> "SpectralField":
        """Field equal to `amplitude` times the basis function at canonical position `index` (0-based)."""
        c = np.zeros(domain.n_modes, dtype=np.complex128)
        c[index] = amplitude
        return cls(domain, c)

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same_domain(self, other)
        return SpectralField(self.domain, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same_domain(self, other)
        return SpectralField(self.domain, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "SpectralField":
        return SpectralField(self.domain, self.coeffs * scalar)

    __rmul__ = __mul__


@dataclass(frozen=True)
class GridField:
    """Complex values at the interior nodes of a uniform grid (Dirichlet: boundary is zero)."""

    domain: BoxDomain
    resolution: tuple[int, ...]
    values: np.ndarray


class FieldNorms(NamedTuple):
    l2: float
    grad: float
    lap: float
    hminus1: float
    h1: float
    h2: float


def _check_same_domain(a, b) -> None:
    if a.domain is not b.domain and (
        a.domain.dim != b.domain.dim
        or a.domain.lengths != b.domain.lengths
        or a.domain.modes != b.domain.modes
        or a.domain.grid != b.domain.grid
    ):
        raise ValueError("fields live on different domains")


def _mode_grid(w: SpectralField) -> np.ndarray:
    """Scatter the canonical coefficient vector onto the per-axis index grid."""
    dom = w.domain
    if dom.dim == 1:
        return w.coeffs
    table = dom.mode_table()
    g = np.zeros(dom.modes, dtype=np.complex128)
    g[table[:, 0] - 1, table[:, 1] - 1] = w.coeffs
    return g


def _gather_modes(domain: BoxDomain, grid_coeffs: np.ndarray) -> np.ndarray:
    if domain.dim == 1:
        return grid_coeffs
    table = domain.mode_table()
    return grid_coeffs[table[:, 0] - 1, table[:, 1] - 1]


def _dst1(values: np.ndarray, axis: int) -> np.ndarray:
    """Sum_j a_j sin(pi j k / N) as an orthogonality-free DST-I, complex-safe."""
    if np.iscomplexobj(values):
        return dst(values.real, type=1, axis=axis) / 2 + 1j * dst(values.imag, type=1, axis=axis) / 2
    return dst(values, type=1, axis=axis) / 2


def synthesize(w: SpectralField, resolution=None) -> GridField:
    """Evaluate the finite sine series at the interior nodes of a uniform grid.

    Exact (to roundoff) for any resolution > modes per axis; default is the
    domain's quadrature grid.
    """
    dom = w.domain
    res = dom.grid if resolution is None else tuple(int(r) for r in _as_tuple(resolution, dom.dim, "resolution"))
    for N, l in zip(res, dom.modes):
        if N <= l:
            raise ValueError(f"resolution {N} too small for {l} modes")
    coeffs = _mode_grid(w)
    scale = np.prod([np.sqrt(2.0 / L) for L in dom.lengths])
    if dom.dim == 1:
        padded = np.zeros(res[0] - 1, dtype=np.complex128)
        padded[: dom.modes[0]] = coeffs * scale
        vals = _dst1(padded, axis=0)
    else:
        padded = np.zeros((res[0] - 1, res[1] - 1), dtype=np.complex128)
        padded[: dom.modes[0], : dom.modes[1]] = coeffs * scale
        vals = _dst1(_dst1(padded, axis=0), axis=1)
    return GridField(dom, res, vals)


def analyze(u: GridField, modes=None) -> SpectralField:
    """L2-project grid values onto span of the first `modes` sine functions.

    Inverse of synthesize on the resolved band; requires resolution >= 2*modes.
    The result lives on the full domain with coefficients beyond the requested
    band set to zero (the Galerkin projection P_modes).
    """
    dom = u.domain
    mds = dom.modes if modes is None else tuple(int(m) for m in _as_tuple(modes, dom.dim, "modes"))
    for N, l in zip(u.resolution, mds):
        if N < 2 * l:
            raise ValueError(f"resolution {N} insufficient for {l} modes (need >= {2 * l})")
    mds = tuple(min(m, l) for m, l in zip(mds, dom.modes))
    vals = u.values
    # a_j = (2/N) sum_k u_k sin(pi j k/N); w_j = a_j * sqrt(L/2) per axis
    for ax, (N, L) in enumerate(zip(u.resolution, dom.lengths)):
        vals = _dst1(vals, axis=ax) * (2.0 / N) * np.sqrt(L / 2.0)
    if dom.dim == 1:
        coeffs = np.zeros(dom.n_modes, dtype=np.complex128)
        coeffs[: mds[0]] = vals[: mds[0]]
    else:
        rect = np.zeros(dom.modes, dtype=np.complex128)
        rect[: mds[0], : mds[1]] = vals[: mds[0], : mds[1]]
        coeffs = _gather_modes(dom, rect)
    return SpectralField(dom, coeffs)


def gradient_values(w: SpectralField, resolution=None) -> list[np.ndarray]:
    """Partial derivatives of the sine series at the interior grid nodes (cosine series)."""
    dom = w.domain
    res = dom.grid if resolution is None else tuple(int(r) for r in _as_tuple(resolution, dom.dim, "resolution"))
    coeffs = _mode_grid(w)
    scale = np.prod([np.sqrt(2.0 / L) for L in dom.lengths])
    out = []
    for ax in range(dom.dim):
        j = np.arange(1, dom.modes[ax] + 1)
        deriv = coeffs * scale
        shape = [1] * dom.dim
        shape[ax] = dom.modes[ax]
        deriv = deriv * (j * np.pi / dom.lengths[ax]).reshape(shape)
        vals = deriv
        for ax2 in range(dom.dim):
            N = res[ax2]
            if ax2 == ax:
                # cosine sum via DCT-I on a length N+1 array with zero endpoints
                buf_shape = list(vals.shape)
                buf_shape[ax2] = N + 1
                buf = np.zeros(buf_shape, dtype=np.complex128)
                sl = [slice(None)] * dom.dim
                sl[ax2] = slice(1, dom.modes[ax2] + 1)
                buf[tuple(sl)] = vals / 2.0
                re = dct(buf.real, type=1, axis=ax2)
                im = dct(buf.imag, type=1, axis=ax2)
                vals = (re + 1j * im)
                sl = [slice(None)] * dom.dim
                sl[ax2] = slice(1, N)
                vals = vals[tuple(sl)]
            else:
                buf_shape = list(vals.shape)
                buf_shape[ax2] = N - 1
                buf = np.zeros(buf_shape, dtype=np.complex128)
                sl = [slice(None)] * dom.dim
                sl[ax2] = slice(0, dom.modes[ax2])
                buf[tuple(sl)] = vals
                vals = _dst1(buf, axis=ax2)
        out.append(vals)
    return out


def norms(w: SpectralField) -> FieldNorms:
    """All diagonal Sobolev-scale norms of a spectral field.

    l2^2 = sum |w_j|^2, grad^2 = sum lambda_j |w_j|^2, lap^2 = sum lambda_j^2 |w_j|^2,
    hminus1^2 = sum |w_j|^2 / lambda_j, h1^2 = l2^2 + grad^2, h2^2 = h1^2 + lap^2.
    """
    lam = w.domain.eigenvalues()
    p = np.abs(w.coeffs) ** 2
    l2sq = float(np.sum(p))
    gradsq = float(np.sum(lam * p))
    lapsq = float(np.sum(lam * lam * p))
    hm1sq = float(np.sum(p / lam))
    return FieldNorms(
        l2=np.sqrt(l2sq),
        grad=np.sqrt(gradsq),
        lap=np.sqrt(lapsq),
        hminus1=np.sqrt(hm1sq),
        h1=np.sqrt(l2sq + gradsq),
        h2=np.sqrt(l2sq + gradsq + lapsq),
    )


def _sine_matrices(domain: BoxDomain):
    """Cached dense synthesize/analyze matrices for the 1-D quadrature grid.

    Matrix products and the DST route compute the same sums; the dense route
    is the faster one at the per-step call rate of the integrator.
    """
    key = "sine_matrices"
    if key not in domain._cache:
        N = domain.grid[0]
        L = domain.lengths[0]
        l = domain.modes[0]
        k = np.arange(1, N)
        j = np.arange(1, l + 1)
        S = np.sqrt(2.0 / L) * np.sin(np.pi * np.outer(k, j) / N)
        A = (L / N) * S.T
        # stored complex so matrix-vector products never re-promote per call
        domain._cache[key] = (S.astype(np.complex128), A.astype(np.complex128))
    return domain._cache[key]


def cubic_coeffs(domain: BoxDomain, coeffs: np.ndarray) -> np.ndarray:
    """Projection coefficients of |v|^2 v from raw coefficients (hot path)."""
    if domain.dim == 1:
        S, A = _sine_matrices(domain)
        u = S @ coeffs
        return A @ (np.abs(u) ** 2 * u)
    u = synthesize(SpectralField(domain, coeffs))
    cubed = GridField(domain, u.resolution, np.abs(u.values) ** 2 * u.values)
    return analyze(cubed).coeffs


def l4_norm4(w: SpectralField) -> float:
    """integral |w|^4 dx by trapezoid quadrature on the padded grid (exact for the resolved band)."""
    u = synthesize(w)
    weight = w.domain.quadrature_weight(u.resolution)
    return float(np.sum(np.abs(u.values) ** 4) * weight)


def cubic_term(v: SpectralField) -> SpectralField:
    """Galerkin projection of |v|^2 v onto the active modes (dealiased by grid padding)."""
    return SpectralField(v.domain, cubic_coeffs(v.domain, v.coeffs))


def mixed_grad_sq_integral(v: SpectralField) -> float:
    """integral |grad v|^2 |v|^2 dx on the padded grid."""
    u = synthesize(v)
    grads = gradient_values(v, u.resolution)
    gsq = np.zeros_like(u.values, dtype=np.float64)
    for g in grads:
        gsq += np.abs(g) ** 2
    weight = v.domain.quadrature_weight(u.resolution)
    return float(np.sum(gsq * np.abs(u.values) ** 2) * weight)


def inner(w1: SpectralField, w2: SpectralField, weight: np.ndarray | None = None) -> complex:
    """Complex L2 pairing (w1, w2) = integral w1 conj(w2), optionally lambda-weighted."""
    _check_same_domain(w1, w2)
    prod = w1.coeffs * np.conj(w2.coeffs)
    if weight is not None:
        prod = prod * weight
    return complex(np.sum(prod))


def quadrature_l2(u: GridField) -> float:
    """Grid-quadrature L2 norm; converges to norms(w).l2 for synthesized fields."""
    weight = u.domain.quadrature_weight(u.resolution)
    return float(np.sqrt(np.sum(np.abs(u.values) ** 2) * weight))
