"""Flat ``key=value`` run configuration and the family registry used by the CLI."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from . import families as fam
from .numerics.grid import Domain, GridSpec, SampledFunction
from .superpotential import PotentialPair, Superpotential

REQUIRED = object()


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending entry."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def parse_text(text: str, source: str = "config") -> dict[str, str]:
    """Parse ``key=value`` lines; ``#`` starts a comment, blank lines are skipped."""
    out = {}
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(line, f"{source} line {n} is not key=value")
        k, v = line.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_overrides(items: list[str]) -> dict[str, str]:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(item, "override is not key=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _number(s: str) -> float:
    # accepts pi-multiples such as 0.5pi for the shift parameter
    t = s.strip().lower()
    if t.endswith("pi"):
        head = t[:-2].rstrip("*")
        return (float(head) if head not in ("", "+", "-") else float(head + "1")) * math.pi
    return float(t)


def _int(s: str) -> int:
    v = float(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s!r}")
    return int(v)


@dataclass(frozen=True)
class Param:
    kind: Callable[[str], Any]
    default: Any = REQUIRED


@dataclass(frozen=True, eq=False)
class Built:
    """Output of a family constructor: a pair (with its source) or a bare potential."""

    W: Superpotential | None = None
    pair: PotentialPair | None = None
    potential: SampledFunction | None = None

    @property
    def grid(self) -> GridSpec:
        return self.pair.grid if self.pair is not None else self.potential.grid

    def select(self, partner: str) -> dict[str, SampledFunction]:
        """Potentials requested by ``partner`` in {V0, V1, both}."""
        if self.pair is None:
            return {"V": self.potential}
        if partner == "V0":
            return {"V0": self.pair.V0}
        if partner == "V1":
            return {"V1": self.pair.V1}
        return {"V0": self.pair.V0, "V1": self.pair.V1}

    def main_potential(self) -> SampledFunction:
        return self.potential if self.pair is None else self.pair.V1


@dataclass(frozen=True)
class FamilySpec:
    name: str
    params: dict[str, Param]
    build: Callable[[dict, GridSpec], Built]
    domain: Domain = Domain.LINE


def _pair(result) -> Built:
    W, pair = result
    return Built(W=W, pair=pair)


F_PRESETS = {
    "tanh": (np.tanh, lambda x: 1 / np.cosh(x) ** 2),
    "sech": (lambda x: 1 / np.cosh(x), lambda x: -np.tanh(x) / np.cosh(x)),
    "zero": (0.0, None),
}


def _constant_g(p, grid):
    if p["f"] not in F_PRESETS:
        raise ConfigError("f", f"unknown preset {p['f']!r}; choose from {sorted(F_PRESETS)}")
    f, fp = F_PRESETS[p["f"]]
    pair = fam.constant_g(p["kappa"], f, fp, p["epsR"], p["epsI"], grid)
    return Built(W=pair.source, pair=pair)


def _constant_f(p, grid):
    pair = fam.constant_f(p["lambda"], p["g"], p["epsR"], p["epsI"], grid)
    return Built(W=pair.source, pair=pair)


def _negative(p, grid):
    kw = {"b": p["b"], "sign": p["sign"]}
    if p["rho"] is not None:
        kw["rho"] = p["rho"]
    if p["a"] is not None:
        kw["a"] = p["a"]
    return _pair(fam.transparent_negative_energy(p["epsR"], grid, **kw))


def _radial(p, grid):
    params = fam.RadialQuasiComplexParams(
        l0=p["l0"], epsI=p["epsI"], epsR=p["epsR"], branch=p["branch"], envelope=p["envelope"],
        m=p["m"], alpha=p["alpha"], mu=p["mu"],
    )
    return _pair(fam.quasi_complex_radial(params, grid))


def load_pair_file(path: str, grid: GridSpec | None = None) -> Built:
    """Read a document written by ``generate`` (a pair or a single potential)."""
    try:
        d = json.loads(Path(path).read_text())
    except OSError as e:
        raise ConfigError("path", f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise ConfigError("path", f"{path} is not valid JSON ({e.msg})") from None
    if "V0_re" in d:
        return Built(W=None, pair=PotentialPair.from_dict(d)) if "f" not in d else _from_pair_dict(d)
    if "V_re" in d:
        g = GridSpec.from_dict(d["grid"])
        return Built(potential=SampledFunction(g, np.asarray(d["V_re"]) + 1j * np.asarray(d["V_im"])))
    raise ConfigError("path", f"{path} holds neither a pair nor a potential")


def _from_pair_dict(d):
    pair = PotentialPair.from_dict(d)
    return Built(W=pair.source, pair=pair)


_f = Param(float, 0.0)
FAMILIES: dict[str, FamilySpec] = {}


def _register(spec: FamilySpec, *aliases: str) -> None:
    for n in (spec.name, *aliases):
        FAMILIES[n] = spec


_register(FamilySpec("transparent_zero_energy", {"a": Param(float), "b": _f},
                     lambda p, g: _pair(fam.transparent_zero_energy(p["a"], p["b"], g))))
_register(FamilySpec("transparent_negative_energy",
                     {"epsR": Param(float), "rho": Param(_number, None), "a": Param(float, None), "b": _f, "sign": Param(_int, 1)},
                     _negative))
_register(FamilySpec("transparent_positive_energy", {"epsR": Param(float), "a": Param(float), "b": _f},
                     lambda p, g: _pair(fam.transparent_positive_energy(p["epsR"], p["a"], p["b"], g))))
_register(FamilySpec("quasi_complex_radial",
                     {"l0": Param(_int, 0), "epsI": Param(float), "epsR": _f, "branch": Param(str, "physical"),
                      "envelope": Param(str, "rational"), "m": Param(_int, 1), "alpha": Param(float, 1.0),
                      "mu": Param(float, None)},
                     _radial, Domain.HALF_LINE), "radial")
_register(FamilySpec("tanh_model", {"alpha": Param(float, 2.0), "beta": Param(float, 1.0), "epsR": _f},
                     lambda p, g: _pair(fam.tanh_model(fam.TanhModelParams(p["alpha"], p["beta"], p["epsR"]), g))), "tanh")
_register(FamilySpec("gaussian_model", {"alpha": Param(float, 1.0), "gamma": Param(float, 1.0), "n": Param(_int, 1), "epsR": _f},
                     lambda p, g: _pair(fam.gaussian_model(
                         fam.GaussianModelParams(p["alpha"], p["gamma"], p["n"], p["epsR"]), g))), "gaussian")
_register(FamilySpec("constant_g", {"kappa": Param(float), "f": Param(str, "tanh"), "epsR": _f, "epsI": _f}, _constant_g))
_register(FamilySpec("constant_f", {"lambda": Param(float), "g": Param(str, "sech"), "epsR": _f, "epsI": _f}, _constant_f))
_register(FamilySpec("harmonic", {"omega": Param(float, 1.0)}, lambda p, g: _pair(fam.harmonic(g, p["omega"]))))
_register(FamilySpec("pt_polynomial", {"A": Param(float, 1.0), "B": Param(float, 1.0), "m": Param(_int, 1), "n": Param(_int, 1)},
                     lambda p, g: Built(potential=fam.pt_polynomial(p["A"], p["B"], p["m"], p["n"], g))))
_register(FamilySpec("square_well", {"depth": Param(float, -1.0), "width": Param(float, 2.0), "center": _f},
                     lambda p, g: Built(potential=fam.square_well(p["depth"], p["width"], g, p["center"]))))
_register(FamilySpec("sech_squared", {"strength": Param(float, -2.0), "scale": Param(float, 1.0)},
                     lambda p, g: Built(potential=fam.sech_squared(p["strength"], g, p["scale"]))))
_register(FamilySpec("constant", {"value": Param(complex, 0j)},
                     lambda p, g: Built(potential=fam.constant_potential(p["value"], g))), "free")
_register(FamilySpec("pair", {"path": Param(str)}, lambda p, g: load_pair_file(p["path"])))

# analysis settings accepted by each subcommand, with defaults
COMMAND_KEYS: dict[str, dict[str, Param]] = {
    "generate": {},
    "spectrum": {"count": Param(_int, 8), "partner": Param(str, "both"), "tolE": Param(float, 1e-3),
                 "include_psi": Param(_bool, False)},
    "intertwine-check": {"samples": Param(_int, 5), "seed": Param(_int, 0), "count": Param(_int, 4),
                         "rtol": Param(float, 1e-6), "map_tol": Param(float, 1e-3)},
    "scatter": {"partner": Param(str, "V1"), "kmin": Param(float, 0.3), "kmax": Param(float, 3.0), "nk": Param(_int, 12),
                "threshold": Param(float, 1e-3), "window": Param(_bool, False), "decay_tol": Param(float, 5e-3),
                "check": Param(_bool, False)},
    "sweep": {"sweep": Param(str, ""), "diagnostics": Param(str, "max_im_E,dissipative,dissipative_margin"),
              "partner": Param(str, "V1"), "count": Param(_int, 6), "kmin": Param(float, 0.3), "kmax": Param(float, 3.0),
              "nk": Param(_int, 12), "window": Param(_bool, False), "decay_tol": Param(float, 5e-3)},
}
GRID_KEYS = {"grid_N": Param(_int, None), "grid_L": Param(float, None), "domain": Param(str, None)}
DEFAULT_GRID = {"generate": (10.0, 2000), "spectrum": (10.0, 2000), "intertwine-check": (10.0, 2000),
                "scatter": (30.0, 4000), "sweep": (10.0, 2000)}
PARTNERS = ("V0", "V1", "both")


@dataclass(frozen=True, eq=False)
class RunConfig:
    command: str
    family: FamilySpec
    params: dict[str, Any]
    grid: GridSpec
    settings: dict[str, Any]
    raw: dict[str, str] = field(repr=False, default_factory=dict)

    def build(self, params: dict[str, Any] | None = None) -> Built:
        p = self.params if params is None else params
        try:
            return self.family.build(p, self.grid)
        except fam.FamilyError as e:
            raise ConfigError(e.key, str(e).split(": ", 1)[-1]) from None


def _convert(key: str, spec: Param, raw: str):
    try:
        return spec.kind(raw)
    except (TypeError, ValueError) as e:
        raise ConfigError(key, f"bad value {raw!r} ({e})") from None


def resolve(command: str, raw: dict[str, str]) -> RunConfig:
    """Validate the merged key-value map for ``command`` into a :class:`RunConfig`."""
    if command not in COMMAND_KEYS:
        raise ConfigError("command", f"unknown command {command!r}")
    raw = dict(raw)
    if "family" not in raw:
        raise ConfigError("family", "missing required key")
    name = raw.pop("family")
    if name not in FAMILIES:
        raise ConfigError("family", f"unknown family {name!r}; choose from {sorted(FAMILIES)}")
    spec = FAMILIES[name]
    if command == "sweep":
        swept = {item.split(":", 1)[0].strip() for item in raw.get("sweep", "").split(";") if item.strip()}
    else:
        swept = set()
    allowed = {**spec.params, **COMMAND_KEYS[command], **GRID_KEYS}
    for k in raw:
        if k not in allowed:
            raise ConfigError(k, f"unknown key for family {spec.name!r} and command {command!r}")
    params = {}
    for k, p in spec.params.items():
        if k in raw:
            params[k] = _convert(k, p, raw[k])
        elif p.default is REQUIRED and k not in swept:
            raise ConfigError(k, "missing required key")
        else:
            params[k] = None if p.default is REQUIRED else p.default
    settings = {k: _convert(k, p, raw[k]) if k in raw else p.default for k, p in COMMAND_KEYS[command].items()}
    if "partner" in settings and settings["partner"] not in PARTNERS:
        raise ConfigError("partner", f"must be one of {PARTNERS}")
    if swept - set(spec.params):
        raise ConfigError(sorted(swept - set(spec.params))[0], f"not a parameter of family {spec.name!r}")
    L, N = DEFAULT_GRID[command]
    if "grid_L" in raw:
        L = _convert("grid_L", GRID_KEYS["grid_L"], raw["grid_L"])
    if "grid_N" in raw:
        N = _convert("grid_N", GRID_KEYS["grid_N"], raw["grid_N"])
    domain = spec.domain
    if "domain" in raw:
        try:
            domain = Domain(raw["domain"])
        except ValueError:
            raise ConfigError("domain", f"must be one of {[d.value for d in Domain]}") from None
    try:
        grid = GridSpec(domain, L, N)
    except ValueError as e:
        raise ConfigError("grid_L" if "extent" in str(e) else "grid_N", str(e)) from None
    return RunConfig(command, spec, params, grid, settings, raw)


def parse_sweep(text: str, spec: FamilySpec) -> list[dict[str, Any]]:
    """``alpha:-2,-1,1;beta:1`` -> Cartesian product of typed parameter dicts."""
    axes = []
    for item in text.split(";"):
        item = item.strip()
        if not item:
            continue
        if ":" not in item:
            raise ConfigError("sweep", f"entry {item!r} is not param:v1,v2,...")
        k, vals = item.split(":", 1)
        k = k.strip()
        if k not in spec.params:
            raise ConfigError(k, f"not a parameter of family {spec.name!r}")
        values = [_convert(k, spec.params[k], v.strip()) for v in vals.split(",") if v.strip()]
        if not values:
            return []
        axes.append((k, values))
    if not axes:
        return []
    rows = [{}]
    for k, values in axes:
        rows = [r | {k: v} for r in rows for v in values]
    return rows
