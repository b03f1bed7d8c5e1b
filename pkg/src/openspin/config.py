"""Experiment configuration: TOML schema, strict validation, state preparation.

Unknown keys anywhere in the file are hard errors, so a typo cannot silently
fall back to a default. The schema is documented in the README.
"""

import math
import re
import sys
from dataclasses import dataclass
from functools import reduce
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError
from .models import build_heisenberg_disordered, build_uniform_dephasing, build_xy, chain, grid
from .observables import ObservableSpec
from .reconstruct import Strategy

_MODEL_KINDS = ("xy_chain", "xy_grid", "heisenberg_disordered")
_SAMPLER_KINDS = ("exact_channel", "trajectories")
_INITIAL_KINDS = ("staggered", "random_product", "computational")

_SCHEMA = {
    "model": {"kind", "n", "rows", "cols", "J", "gamma", "h", "disorder_seed"},
    "evolution": {"dt", "T"},
    "strategy": {"kind", "truncation_eps"},
    "sampler": {"kind", "M", "seed"},
    "initial_state": {"kind", "seed", "bitstring"},
    "output": {"observables", "reference"},
}


@dataclass(frozen=True)
class ExperimentConfig:
    model_kind: str
    n: int
    rows: int | None
    cols: int | None
    J: float
    gamma: float
    h: float | None
    disorder_seed: int | None
    dt: float
    T: float
    strategy: Strategy
    sampler_kind: str
    M: int | None
    sampler_seed: int | None
    initial_kind: str
    initial_seed: int | None
    bitstring: str | None
    observables: tuple
    reference: bool
    raw: dict  # parsed file contents, echoed into run metadata

    @property
    def steps(self) -> int:
        return round(self.T / self.dt)


def _require(section: dict, key: str, types, where: str):
    if key not in section:
        raise ConfigError(f"missing required key {where}.{key}")
    val = section[key]
    if not isinstance(val, types) or isinstance(val, bool) and types != (bool,):
        raise ConfigError(f"{where}.{key} has wrong type {type(val).__name__}")
    return val


def _optional(section: dict, key: str, types, where: str, default=None):
    if key not in section:
        return default
    val = section[key]
    if not isinstance(val, types) or isinstance(val, bool) and types != (bool,):
        raise ConfigError(f"{where}.{key} has wrong type {type(val).__name__}")
    return val


_OBS_RE = re.compile(r"^(\w+)(?:\(([^)]*)\))?$")


def parse_observable(text: str) -> ObservableSpec:
    """Parse one observable string: correlation(i,j), entropy(all), entropy(0,1),
    imbalance, pauli(LETTERS)."""
    mt = _OBS_RE.match(text.strip())
    if not mt:
        raise ConfigError(f"cannot parse observable {text!r}")
    name, arg = mt.group(1), mt.group(2)
    try:
        if name == "correlation":
            i, j = (int(s) for s in arg.split(","))
            return ObservableSpec(kind="correlation", sites=(i, j))
        if name == "entropy":
            if arg is None or arg.strip() == "all":
                return ObservableSpec(kind="entropy")
            sites = tuple(int(s) for s in arg.split(","))
            return ObservableSpec(kind="entropy", sites=sites)
        if name == "imbalance":
            if arg:
                raise ValueError("imbalance takes no arguments")
            return ObservableSpec(kind="imbalance")
        if name == "pauli":
            return ObservableSpec(kind="pauli", letters=(arg or "").strip())
        raise ValueError(f"unknown observable {name!r}")
    except (ValueError, TypeError, AttributeError) as exc:
        raise ConfigError(f"bad observable {text!r}: {exc}") from exc


def parse_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML parse error in {path}: {exc}") from exc

    unknown_sections = set(raw) - set(_SCHEMA)
    if unknown_sections:
        raise ConfigError(f"unknown config sections {sorted(unknown_sections)}")
    for name, keys in _SCHEMA.items():
        if name in raw:
            if not isinstance(raw[name], dict):
                raise ConfigError(f"section [{name}] must be a table")
            bad = set(raw[name]) - keys
            if bad:
                raise ConfigError(f"unknown keys {sorted(bad)} in section [{name}]")
    for required_section in ("model", "evolution", "initial_state", "output"):
        if required_section not in raw:
            raise ConfigError(f"missing required section [{required_section}]")

    model = raw["model"]
    kind = _require(model, "kind", (str,), "model")
    if kind not in _MODEL_KINDS:
        raise ConfigError(f"model.kind must be one of {_MODEL_KINDS}, got {kind!r}")
    J = float(_optional(model, "J", (int, float), "model", default=-1.0))
    gamma = float(_require(model, "gamma", (int, float), "model"))
    if gamma < 0:
        raise ConfigError(f"model.gamma must be >= 0, got {gamma}")
    rows = cols = None
    h = None
    disorder_seed = None
    if kind == "xy_grid":
        rows = _require(model, "rows", (int,), "model")
        cols = _require(model, "cols", (int,), "model")
        if rows < 1 or cols < 1:
            raise ConfigError(f"grid extents must be >= 1, got {rows}x{cols}")
        if "n" in model and model["n"] != rows * cols:
            raise ConfigError(f"model.n={model['n']} contradicts rows*cols={rows * cols}")
        n = rows * cols
    else:
        n = _require(model, "n", (int,), "model")
        if "rows" in model or "cols" in model:
            raise ConfigError(f"rows/cols only apply to xy_grid, not {kind}")
        if kind == "heisenberg_disordered":
            if n < 2:
                raise ConfigError(f"heisenberg needs n >= 2, got {n}")
            h = float(_require(model, "h", (int, float), "model"))
            if h < 0:
                raise ConfigError(f"model.h must be >= 0, got {h}")
            disorder_seed = _require(model, "disorder_seed", (int,), "model")
        elif n < 1:
            raise ConfigError(f"model.n must be >= 1, got {n}")
    if kind != "heisenberg_disordered" and ("h" in model or "disorder_seed" in model):
        raise ConfigError("h/disorder_seed only apply to heisenberg_disordered")

    evolution = raw["evolution"]
    dt = float(_require(evolution, "dt", (int, float), "evolution"))
    T = float(_require(evolution, "T", (int, float), "evolution"))
    if dt <= 0:
        raise ConfigError(f"evolution.dt must be positive, got {dt}")
    if T < dt:
        raise ConfigError(f"evolution.T={T} is shorter than one step dt={dt}")
    if abs(round(T / dt) * dt - T) > 1e-9:
        raise ConfigError(f"evolution.T={T} is not a whole number of dt={dt} steps")

    strat_sec = raw.get("strategy", {})
    strat_kind = _optional(strat_sec, "kind", (str,), "strategy", default="reconstructed")
    eps = _optional(strat_sec, "truncation_eps", (int, float), "strategy", default=1e-12)
    try:
        strategy = Strategy(kind=strat_kind, truncation_eps=float(eps))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    sampler = raw.get("sampler", {})
    sampler_kind = _optional(sampler, "kind", (str,), "sampler", default="exact_channel")
    if sampler_kind not in _SAMPLER_KINDS:
        raise ConfigError(f"sampler.kind must be one of {_SAMPLER_KINDS}, got {sampler_kind!r}")
    M = sampler_seed = None
    if sampler_kind == "trajectories":
        M = _require(sampler, "M", (int,), "sampler")
        if M < 1:
            raise ConfigError(f"sampler.M must be >= 1, got {M}")
        sampler_seed = _require(sampler, "seed", (int,), "sampler")
    elif "M" in sampler or "seed" in sampler:
        raise ConfigError("sampler.M/seed only apply to kind='trajectories'")

    initial = raw["initial_state"]
    initial_kind = _require(initial, "kind", (str,), "initial_state")
    if initial_kind not in _INITIAL_KINDS:
        raise ConfigError(
            f"initial_state.kind must be one of {_INITIAL_KINDS}, got {initial_kind!r}"
        )
    initial_seed = None
    bitstring = None
    if initial_kind == "random_product":
        initial_seed = _require(initial, "seed", (int,), "initial_state")
    elif "seed" in initial:
        raise ConfigError("initial_state.seed only applies to kind='random_product'")
    if initial_kind == "computational":
        bitstring = _require(initial, "bitstring", (str,), "initial_state")
        if len(bitstring) != n or set(bitstring) - {"0", "1"}:
            raise ConfigError(f"bitstring must be {n} characters of 0/1, got {bitstring!r}")
    elif "bitstring" in initial:
        raise ConfigError("initial_state.bitstring only applies to kind='computational'")
    if initial_kind == "staggered" and n % 2 != 0:
        raise ConfigError(f"staggered initial state needs even n, got {n}")

    output = raw["output"]
    obs_list = _require(output, "observables", (list,), "output")
    if not obs_list:
        raise ConfigError("output.observables must name at least one observable")
    observables = []
    for item in obs_list:
        if not isinstance(item, str):
            raise ConfigError(f"observable entries must be strings, got {item!r}")
        spec = parse_observable(item)
        try:
            spec.check_sites(n)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        observables.append(spec)
    reference = _optional(output, "reference", (bool,), "output", default=False)

    if sampler_kind == "trajectories":
        nonlinear = [o.label for o in observables if not o.linear]
        if nonlinear:
            raise ConfigError(
                f"observables {nonlinear} are nonlinear and cannot be sampled from "
                "trajectories; use sampler.kind='exact_channel'"
            )

    return ExperimentConfig(
        model_kind=kind, n=n, rows=rows, cols=cols, J=J, gamma=gamma, h=h,
        disorder_seed=disorder_seed, dt=dt, T=T, strategy=strategy,
        sampler_kind=sampler_kind, M=M, sampler_seed=sampler_seed,
        initial_kind=initial_kind, initial_seed=initial_seed, bitstring=bitstring,
        observables=tuple(observables), reference=bool(reference), raw=raw,
    )


def build_system(cfg: ExperimentConfig):
    """(H, dissipators, disorder realization or None) for the configured model."""
    realization = None
    if cfg.model_kind == "xy_chain":
        H = build_xy(chain(cfg.n), cfg.J)
    elif cfg.model_kind == "xy_grid":
        H = build_xy(grid(cfg.rows, cfg.cols), cfg.J)
    else:
        H, realization = build_heisenberg_disordered(cfg.n, cfg.J, cfg.h, cfg.disorder_seed)
    diss = build_uniform_dephasing(cfg.n, cfg.gamma)
    return H, diss, realization


def initial_state_vector(cfg: ExperimentConfig) -> np.ndarray:
    """The configured pure initial state as a 2^n vector."""
    n = cfg.n
    if cfg.initial_kind == "staggered":
        bits = "".join("01"[i % 2] for i in range(n))
        psi = np.zeros(1 << n, dtype=complex)
        psi[int(bits, 2)] = 1.0
        return psi
    if cfg.initial_kind == "computational":
        psi = np.zeros(1 << n, dtype=complex)
        psi[int(cfg.bitstring, 2)] = 1.0
        return psi
    theta = np.random.default_rng(cfg.initial_seed).uniform(0.0, 2.0 * math.pi, n)
    factors = [np.array([math.cos(t), math.sin(t)], dtype=complex) for t in theta]
    return reduce(np.kron, factors)
