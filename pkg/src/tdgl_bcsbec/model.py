"""Physical parameter model for the coupled TDGL/Schrodinger system.

The pair field v and condensed boson field phi obey

    d v_t - i(a - 1/U) v - (i g/U) phi - (i c/4m) Lap v + i b |v|^2 v = f,
    phi_t + gamma phi - (i g/U) v + i(g^2/U + 2 nu - 2 mu) phi - (i/4m) Lap phi = h,

with homogeneous Dirichlet conditions. v relates to the original fermion-pair
field u through v = u + g phi. Coefficient admissibility: U, b, c, m, gamma > 0,
a U < 1, and d = d_r + i d_i with d_i > 0 (so the v-equation is parabolic after
division by d).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import SpectralField, _check_same_domain


@dataclass(frozen=True)
class PhysParams:
    """All model coefficients. gamma is the damping rate of the phi equation."""

    U: float = 1.0
    a: float = 0.0
    b: float = 1.0
    c: float = 1.0
    m: float = 0.25
    g: float = 1.0
    nu: float = 0.5
    mu: float = 0.25
    gamma: float = 0.5
    d_r: float = 0.3
    d_i: float = 1.0

    @property
    def d(self) -> complex:
        return complex(self.d_r, self.d_i)

    @property
    def inv_d(self) -> complex:
        """1/d = conj(d)/|d|^2, precomputed so inner loops never divide by a complex."""
        return complex(self.d_r, -self.d_i) / (self.d_r**2 + self.d_i**2)

    @property
    def phi_rotation(self) -> float:
        """Coefficient g^2/U + 2 nu - 2 mu of the phi phase rotation."""
        return self.g**2 / self.U + 2.0 * self.nu - 2.0 * self.mu


@dataclass(frozen=True)
class ValidityReport:
    ok: bool
    violations: tuple[str, ...]
    derived: dict

    def __bool__(self) -> bool:
        return self.ok


def validate_params(p: PhysParams) -> ValidityReport:
    """Check the admissibility constraints; report violations and derived quantities."""
    violations = []
    for name in ("U", "b", "c", "m", "gamma"):
        if not getattr(p, name) > 0:
            violations.append(f"{name} > 0 violated ({name} = {getattr(p, name)})")
    if not p.a * p.U < 1:
        violations.append(f"a*U < 1 violated (a*U = {p.a * p.U})")
    if not p.d_i > 0:
        violations.append(f"d_i > 0 violated (d_i = {p.d_i})")
    if not abs(p.d) > 0:
        violations.append("|d| > 0 violated")
    for name in ("U", "a", "b", "c", "m", "g", "nu", "mu", "gamma", "d_r", "d_i"):
        if not np.isfinite(getattr(p, name)):
            violations.append(f"{name} is not finite")
    derived = {}
    if not violations:
        derived = {
            "one_over_U_minus_a": 1.0 / p.U - p.a,
            "inv_d": p.inv_d,
            "abs_d": abs(p.d),
            "parabolic_coeff": (p.c / (4.0 * p.m)) * p.d_i / abs(p.d) ** 2,
        }
    return ValidityReport(ok=not violations, violations=tuple(violations), derived=derived)


def require_valid(p: PhysParams) -> None:
    report = validate_params(p)
    if not report.ok:
        raise ValueError("invalid parameters: " + "; ".join(report.violations))


def require_admissible(p: PhysParams) -> None:
    """As require_valid, but b = 0 is tolerated: the linear limit is the
    reference configuration for the exact-propagator oracles."""
    report = validate_params(p)
    blocking = [v for v in report.violations if not (v.startswith("b > 0") and p.b == 0.0)]
    if blocking:
        raise ValueError("invalid parameters: " + "; ".join(blocking))


@dataclass(frozen=True)
class Forcing:
    """Time-independent forces on the v and phi equations."""

    f: SpectralField
    h: SpectralField

    def __post_init__(self):
        _check_same_domain(self.f, self.h)

    @classmethod
    def zero(cls, domain) -> "Forcing":
        return cls(SpectralField.zero(domain), SpectralField.zero(domain))

    @classmethod
    def from_modes(cls, domain, f_modes=None, h_modes=None) -> "Forcing":
        """Build from {1-based canonical mode index: complex amplitude} maps."""

        def build(modes):
            c = np.zeros(domain.n_modes, dtype=np.complex128)
            for idx, amp in (modes or {}).items():
                if not 1 <= idx <= domain.n_modes:
                    raise ValueError(f"mode index {idx} outside 1..{domain.n_modes}")
                c[idx - 1] = amp
            return SpectralField(domain, c)

        return cls(build(f_modes), build(h_modes))

    @property
    def is_zero(self) -> bool:
        return not (np.any(self.f.coeffs) or np.any(self.h.coeffs))


def to_original_variables(v: SpectralField, phi: SpectralField, g: float):
    """Recover the fermion-pair field: u = v - g*phi (phi unchanged)."""
    _check_same_domain(v, phi)
    return SpectralField(v.domain, v.coeffs - g * phi.coeffs), phi


def from_original_variables(u: SpectralField, phi: SpectralField, g: float):
    """Forward change of variables: v = u + g*phi."""
    _check_same_domain(u, phi)
    return SpectralField(u.domain, u.coeffs + g * phi.coeffs), phi
