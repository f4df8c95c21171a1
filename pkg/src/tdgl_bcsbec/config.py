"""Experiment configuration: flat `key = value` text under [section] headers.

Complex numbers are written `re+imi` (e.g. `d = 0.3+1.0i`); lists are
comma-separated; mode lists pair a 1-based canonical mode index with a complex
amplitude (`f = 1:0.5+0i, 3:0.1-0.2i`). Unknown sections or keys are errors so
typos cannot silently fall back to defaults.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import EnergyWeights
from .model import PhysParams
from .spectral import BoxDomain


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class InitialSpec:
    kind: str = "seeded-random"  # zero | seeded-random | mode-list
    radius: float = 2.0
    decay: float = 1.5
    v_modes: dict = field(default_factory=dict)
    phi_modes: dict = field(default_factory=dict)


@dataclass(frozen=True)
class IntegratorSpec:
    dt: float = 1e-3
    T: float = 20.0
    sample_stride: int = 50
    guard: float = 1e6


@dataclass(frozen=True)
class ExperimentConfig:
    params: PhysParams = PhysParams()
    domain: BoxDomain = field(default_factory=lambda: BoxDomain(dim=1, lengths=np.pi, modes=64, grid=256))
    f_modes: dict = field(default_factory=dict)
    h_modes: dict = field(default_factory=dict)
    initial: InitialSpec = InitialSpec()
    integrator: IntegratorSpec = IntegratorSpec()
    weights: EnergyWeights = EnergyWeights()
    scenario: str = "single-run"
    name: str = "default"
    out: str | None = None
    seed: int = 1234
    options: dict = field(default_factory=dict)

    def echo(self) -> dict:
        """Nested plain-value view of the configuration for the summary file."""
        p = self.params
        return {
            "params": {k: getattr(p, k) for k in ("U", "a", "b", "c", "m", "g", "nu", "mu", "gamma", "d_r", "d_i")},
            "domain": {
                "dim": self.domain.dim,
                "lengths": list(self.domain.lengths),
                "modes": list(self.domain.modes),
                "grid": list(self.domain.grid),
            },
            "forcing": {
                "f": {str(k): [v.real, v.imag] for k, v in self.f_modes.items()},
                "h": {str(k): [v.real, v.imag] for k, v in self.h_modes.items()},
            },
            "initial": {
                "type": self.initial.kind,
                "radius": self.initial.radius,
                "decay": self.initial.decay,
                "v": {str(k): [v.real, v.imag] for k, v in self.initial.v_modes.items()},
                "phi": {str(k): [v.real, v.imag] for k, v in self.initial.phi_modes.items()},
            },
            "integrator": {
                "dt": self.integrator.dt,
                "T": self.integrator.T,
                "sample_stride": self.integrator.sample_stride,
                "guard": self.integrator.guard,
            },
            "weights": {
                k: getattr(self.weights, k)
                for k in ("kappa", "kappa1", "kappa2", "kappa3", "kappa4", "w_t", "w_E3")
            },
            "run": {"name": self.name, "scenario": self.scenario, "seed": self.seed, "out": self.out},
            "options": {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.options.items()},
        }


SCENARIOS = (
    "single-run",
    "two-trajectory",
    "decomposition",
    "convergence",
    "absorbing-ensemble",
    "certificates",
)

_KNOWN_KEYS = {
    "params": {"u", "a", "b", "c", "m", "g", "nu", "mu", "gamma", "d"},
    "domain": {"dim", "lengths", "modes", "grid"},
    "forcing": {"f", "h"},
    "initial": {"type", "radius", "decay", "v", "phi"},
    "integrator": {"dt", "t", "sample_stride", "guard"},
    "weights": {"kappa", "kappa1", "kappa2", "kappa3", "kappa4", "w_t", "w_e3"},
    "run": {"name", "scenario", "seed", "out"},
    "scenario": None,  # free-form scenario options
}


def _parse_complex(text: str, where: str) -> complex:
    s = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(s)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse complex number {text!r}") from exc


def _parse_float(text: str, where: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse number {text!r}") from exc


def _parse_int(text: str, where: str) -> int:
    try:
        return int(text)
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse integer {text!r}") from exc


def _parse_float_list(text: str, where: str):
    return tuple(_parse_float(part, where) for part in text.split(",") if part.strip())


def _parse_mode_list(text: str, where: str) -> dict:
    text = text.strip()
    if text.lower() in ("zero", "none", ""):
        return {}
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        if ":" not in part:
            raise ConfigError(f"{where}: mode entries must look like index:amplitude, got {part!r}")
        idx_s, amp_s = part.split(":", 1)
        idx = _parse_int(idx_s.strip(), where)
        if idx < 1:
            raise ConfigError(f"{where}: mode indices are 1-based, got {idx}")
        out[idx] = _parse_complex(amp_s, where)
    return out


def _read_sections(text: str):
    sections: dict[str, dict[str, str]] = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].split(";", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1].strip().lower()
            if current not in _KNOWN_KEYS:
                raise ConfigError(f"line {lineno}: unknown section [{current}]")
            sections.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw.strip()!r}")
        if current is None:
            raise ConfigError(f"line {lineno}: key outside any [section]")
        key, value = (part.strip() for part in line.split("=", 1))
        known = _KNOWN_KEYS[current]
        if known is not None and key.lower() not in known:
            raise ConfigError(f"line {lineno}: unknown key {key!r} in section [{current}]")
        sections[current][key.lower()] = value
    return sections


def parse_config(text: str) -> ExperimentConfig:
    """Parse a configuration document into an ExperimentConfig (defaults fill gaps)."""
    sections = _read_sections(text)
    cfg = ExperimentConfig()

    sec = sections.get("params", {})
    pkw = {}
    for key, val in sec.items():
        if key == "d":
            d = _parse_complex(val, "params.d")
            pkw["d_r"], pkw["d_i"] = d.real, d.imag
        else:
            name = {"u": "U"}.get(key, key)
            pkw[name] = _parse_float(val, f"params.{key}")
    params = replace(cfg.params, **pkw) if pkw else cfg.params

    sec = sections.get("domain", {})
    if sec:
        dim = _parse_int(sec.get("dim", "1"), "domain.dim")
        lengths = _parse_float_list(sec.get("lengths", str(np.pi)), "domain.lengths")
        modes = tuple(int(x) for x in _parse_float_list(sec.get("modes", "64"), "domain.modes"))
        grid_txt = sec.get("grid")
        grid = tuple(int(x) for x in _parse_float_list(grid_txt, "domain.grid")) if grid_txt else None
        try:
            domain = BoxDomain(
                dim=dim,
                lengths=lengths if len(lengths) > 1 else lengths[0],
                modes=modes if len(modes) > 1 else modes[0],
                grid=(grid if grid is None or len(grid) > 1 else grid[0]),
            )
        except ValueError as exc:
            raise ConfigError(f"domain: {exc}") from exc
    else:
        domain = cfg.domain

    sec = sections.get("forcing", {})
    f_modes = _parse_mode_list(sec.get("f", "zero"), "forcing.f")
    h_modes = _parse_mode_list(sec.get("h", "zero"), "forcing.h")
    for name, modes_map in (("f", f_modes), ("h", h_modes)):
        for idx in modes_map:
            if idx > domain.n_modes:
                raise ConfigError(f"forcing.{name}: mode index {idx} exceeds {domain.n_modes} active modes")

    sec = sections.get("initial", {})
    initial = InitialSpec(
        kind=sec.get("type", cfg.initial.kind),
        radius=_parse_float(sec.get("radius", str(cfg.initial.radius)), "initial.radius"),
        decay=_parse_float(sec.get("decay", str(cfg.initial.decay)), "initial.decay"),
        v_modes=_parse_mode_list(sec.get("v", ""), "initial.v"),
        phi_modes=_parse_mode_list(sec.get("phi", ""), "initial.phi"),
    )
    if initial.kind not in ("zero", "seeded-random", "mode-list"):
        raise ConfigError(f"initial.type: unknown kind {initial.kind!r}")
    if initial.radius < 0:
        raise ConfigError("initial.radius: must be >= 0")

    sec = sections.get("integrator", {})
    integrator = IntegratorSpec(
        dt=_parse_float(sec.get("dt", str(cfg.integrator.dt)), "integrator.dt"),
        T=_parse_float(sec.get("t", str(cfg.integrator.T)), "integrator.T"),
        sample_stride=_parse_int(sec.get("sample_stride", str(cfg.integrator.sample_stride)), "integrator.sample_stride"),
        guard=_parse_float(sec.get("guard", str(cfg.integrator.guard)), "integrator.guard"),
    )
    if integrator.dt <= 0:
        raise ConfigError("integrator.dt: must be > 0")
    if integrator.T < 0:
        raise ConfigError("integrator.T: must be >= 0")
    if integrator.sample_stride < 1:
        raise ConfigError("integrator.sample_stride: must be >= 1")

    sec = sections.get("weights", {})
    wkw = {("w_E3" if k == "w_e3" else k): _parse_float(v, f"weights.{k}") for k, v in sec.items()}
    try:
        weights = replace(cfg.weights, **wkw) if wkw else cfg.weights
    except ValueError as exc:
        raise ConfigError(f"weights: {exc}") from exc

    sec = sections.get("run", {})
    scenario = sec.get("scenario", cfg.scenario)
    if scenario not in SCENARIOS:
        raise ConfigError(f"run.scenario: unknown scenario {scenario!r} (known: {', '.join(SCENARIOS)})")
    name = sec.get("name", cfg.name)
    seed = _parse_int(sec.get("seed", str(cfg.seed)), "run.seed")
    out = sec.get("out") or None

    options = dict(sections.get("scenario", {}))
    return ExperimentConfig(
        params=params,
        domain=domain,
        f_modes=f_modes,
        h_modes=h_modes,
        initial=initial,
        integrator=integrator,
        weights=weights,
        scenario=scenario,
        name=name,
        out=out,
        seed=seed,
        options=options,
    )


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def opt_float(cfg: ExperimentConfig, key: str, default: float) -> float:
    return _parse_float(cfg.options[key], f"scenario.{key}") if key in cfg.options else default


def opt_int(cfg: ExperimentConfig, key: str, default: int) -> int:
    return _parse_int(cfg.options[key], f"scenario.{key}") if key in cfg.options else default


def opt_float_list(cfg: ExperimentConfig, key: str, default):
    return _parse_float_list(cfg.options[key], f"scenario.{key}") if key in cfg.options else tuple(default)
