"""``complexsusy`` command-line front end.

Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any

import numpy as np

from . import analysis, scattering
from .config import Built, ConfigError, RunConfig, parse_overrides, parse_sweep, parse_text, resolve
from .families import FamilyError
from .numerics.eigen import EigensolverError
from .numerics.grid import SampledFunction
from .superpotential import (
    commutator_residual,
    factorization_residuals,
    identity_tolerance,
    intertwining_residuals,
    potential_scale,
    random_smooth_function,
)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
COMMANDS = ("generate", "spectrum", "intertwine-check", "scatter", "sweep")
DIAGNOSTICS = ("max_im_E", "n_bound", "max_R", "max_T_dev", "dissipative", "dissipative_margin")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return str(v)


class Output:
    def __init__(self, out: Path, fmt_choice: str):
        self.dir = out
        self.json = fmt_choice in ("json", "both")
        self.csv = fmt_choice in ("csv", "both")
        self.dir.mkdir(parents=True, exist_ok=True)

    def write_json(self, name: str, doc: Any) -> None:
        if self.json:
            (self.dir / f"{name}.json").write_text(json.dumps(doc, indent=1))

    def write_csv(self, name: str, header: list[str], rows) -> None:
        if self.csv:
            with open(self.dir / f"{name}.csv", "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                if header:
                    w.writerow(header)
                for row in rows:
                    w.writerow([fmt(v) for v in row])


def _potential_doc(V: SampledFunction) -> dict:
    return {"grid": V.grid.to_dict(), "V_re": V.real.tolist(), "V_im": V.imag.tolist()}


# ---------------------------------------------------------------- commands

def cmd_generate(cfg: RunConfig, out: Output) -> int:
    b = cfg.build()
    if b.pair is None:
        V = b.potential
        out.write_json("potential", _potential_doc(V))
        out.write_csv("potential", ["x", "V_re", "V_im"], zip(V.x, V.real, V.imag))
        return EXIT_OK
    p = b.pair
    out.write_json("pair", p.to_dict())
    cols = [p.grid.nodes, p.U0_R, p.U0_I, p.U1_R, p.U1_I]
    header = ["x", "U0_R", "U0_I", "U1_R", "U1_I"]
    if p.source is not None:
        cols += [p.source.f, p.source.g]
        header += ["f", "g"]
    out.write_csv("pair", header, zip(*cols))
    return EXIT_OK


def _spectra(b: Built, partner: str, count: int) -> dict[str, analysis.Spectrum]:
    return {name: analysis.spectrum(V, count=count) for name, V in b.select(partner).items()}


def cmd_spectrum(cfg: RunConfig, out: Output) -> int:
    s = cfg.settings
    b = cfg.build()
    spectra = _spectra(b, s["partner"], s["count"])
    doc = {name: S.to_dict(include_psi=s["include_psi"]) for name, S in spectra.items()}
    if set(spectra) == {"V0", "V1"}:
        rep = analysis.compare_spectra(spectra["V0"], spectra["V1"], s["tolE"], b.W)
        doc["report"] = rep.to_dict()
    out.write_json("spectrum", doc)
    rows = [(name, i, e.E.real, e.E.imag, e.bound) for name, S in spectra.items() for i, e in enumerate(S)]
    out.write_csv("spectrum", ["potential", "index", "E_re", "E_im", "bound"], rows)
    return EXIT_OK


def cmd_intertwine_check(cfg: RunConfig, out: Output) -> int:
    s = cfg.settings
    b = cfg.build()
    if b.pair is None or b.pair.source is None:
        raise ConfigError("family", "intertwine-check needs a superpotential")
    pair, W = b.pair, b.pair.source
    rng = np.random.default_rng(s["seed"])
    checks = []
    for i in range(s["samples"]):
        psi = random_smooth_function(pair.grid, rng)
        tol = identity_tolerance(pair, psi, s["rtol"])
        for name, val in factorization_residuals(pair, psi).items():
            checks.append({"check": f"factorization_{name}", "sample": i, "residual": val, "tol": tol})
        for name, val in intertwining_residuals(pair, psi).items():
            checks.append({"check": f"intertwining_{name}", "sample": i, "residual": val, "tol": tol})
    ctol = 1e-8 * (1 + potential_scale(pair))
    checks.append({"check": "commutator", "sample": None, "residual": commutator_residual(pair), "tol": ctol})
    if s["count"] > 0:
        for src, dst, direction in (("V1", "V0", "q_plus"), ("V0", "V1", "q_minus")):
            S = analysis.spectrum(getattr(pair, src), count=s["count"])
            for i, e in enumerate(S.bound):
                r = analysis.mapping_residual(pair, e.E, e.psi, direction)
                if not np.isfinite(r):
                    continue  # zero mode, mapped to nothing
                checks.append({"check": f"mapping_{direction}_{src}_to_{dst}", "sample": i, "residual": r,
                               "tol": s["map_tol"], "E": [e.E.real, e.E.imag]})
    for c in checks:
        c["passed"] = bool(c["residual"] <= c["tol"])
    ok = all(c["passed"] for c in checks)
    out.write_json("intertwine", {"passed": ok, "checks": checks})
    out.write_csv("intertwine", ["check", "sample", "residual", "tol", "passed"],
                  ((c["check"], "" if c["sample"] is None else c["sample"], c["residual"], c["tol"], c["passed"]) for c in checks))
    return EXIT_OK if ok else EXIT_FAIL


def _scan(b: Built, s: dict, jobs: int) -> scattering.TransparencyReport:
    V = b.select(s["partner"] if s["partner"] != "both" else "V1")
    V = next(iter(V.values()))
    if s["window"]:
        V = scattering.decay_window(V)
    try:
        return scattering.transparency_scan(V, s["kmin"], s["kmax"], s["nk"], s.get("threshold", 1e-3),
                                            decay_tol=s["decay_tol"], jobs=jobs)
    except ValueError as e:
        if "decay" in str(e):
            raise ConfigError("decay_tol", str(e)) from None
        raise


def cmd_scatter(cfg: RunConfig, out: Output, jobs: int = 1) -> int:
    s = cfg.settings
    rep = _scan(cfg.build(), s, jobs)
    out.write_json("scatter", rep.to_dict())
    out.write_csv("scatter", ["k", "abs_R", "abs_T", "arg_T"], rep.rows())
    return EXIT_FAIL if s["check"] and not rep.passed else EXIT_OK


def _diagnose(cfg: RunConfig, params: dict, diags: list[str]) -> dict:
    s = cfg.settings
    b = cfg.build(params)
    V = next(iter(b.select(s["partner"] if s["partner"] != "both" else "V1").values()))
    row = {}
    if "max_im_E" in diags or "n_bound" in diags:
        S = analysis.spectrum(V, count=s["count"])
        levels = S.bound or S.entries
        row["max_im_E"] = float(max(abs(e.E.imag) for e in levels))
        row["n_bound"] = len(S.bound)
    if "max_R" in diags or "max_T_dev" in diags:
        rep = _scan(b, s, 1)
        row["max_R"] = rep.max_R
        row["max_T_dev"] = rep.max_T_deviation
    if "dissipative" in diags or "dissipative_margin" in diags:
        d = analysis.dissipativity_check(V)
        row["dissipative"] = d.dissipative
        row["dissipative_margin"] = d.margin
    return {k: row[k] for k in diags}


def cmd_sweep(cfg: RunConfig, out: Output, jobs: int = 1) -> int:
    s = cfg.settings
    diags = [d.strip() for d in s["diagnostics"].split(",") if d.strip()]
    for d in diags:
        if d not in DIAGNOSTICS:
            raise ConfigError("diagnostics", f"unknown diagnostic {d!r}; choose from {DIAGNOSTICS}")
    points = parse_sweep(s["sweep"], cfg.family)
    if not points:
        if out.csv:
            (out.dir / "sweep.csv").write_text("")
        if out.json:
            (out.dir / "sweep.json").write_text("")
        return EXIT_OK
    keys = list(points[0])
    full = [cfg.params | p for p in points]
    for p in full:
        missing = [k for k, v in p.items() if v is None and cfg.family.params[k].default is not None]
        if missing:
            raise ConfigError(missing[0], "missing required key")
    run = lambda p: _diagnose(cfg, p, diags)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(run, full))
    else:
        results = [run(p) for p in full]
    rows = [{k: p[k] for k in keys} | r for p, r in zip(points, results)]
    out.write_json("sweep", {"family": cfg.family.name, "rows": rows})
    out.write_csv("sweep", keys + diags, ([r[k] for k in keys + diags] for r in rows))
    return EXIT_OK


# ---------------------------------------------------------------- entry point

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="flat key=value configuration file")
    common.add_argument("--out", type=Path, default=Path("."), help="output directory")
    common.add_argument("--grid-N", type=int, dest="grid_N")
    common.add_argument("--grid-L", type=float, dest="grid_L")
    common.add_argument("--domain", choices=("line", "half_line"))
    common.add_argument("--jobs", type=int, default=1, help="parallel workers for sweep and scan rows")
    common.add_argument("--format", choices=("json", "csv", "both"), default="both")
    common.add_argument("overrides", nargs="*", metavar="key=value")
    p = argparse.ArgumentParser(prog="complexsusy", description="Partner potentials of complex superpotentials.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return p


def merged_config(args) -> dict[str, str]:
    raw = {}
    if args.config is not None:
        try:
            raw.update(parse_text(args.config.read_text(), str(args.config)))
        except OSError as e:
            raise ConfigError("config", f"cannot read {args.config}: {e.strerror}") from None
    raw.update(parse_overrides(args.overrides))
    for k in ("grid_N", "grid_L", "domain"):
        v = getattr(args, k)
        if v is not None:
            raw[k] = str(v)
    return raw


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        cfg = resolve(args.command, merged_config(args))
        out = Output(args.out, args.format)
        if args.command == "generate":
            return cmd_generate(cfg, out)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, out)
        if args.command == "intertwine-check":
            return cmd_intertwine_check(cfg, out)
        if args.command == "scatter":
            return cmd_scatter(cfg, out, args.jobs)
        return cmd_sweep(cfg, out, args.jobs)
    except (ConfigError, FamilyError) as e:
        print(f"complexsusy: configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except EigensolverError as e:
        print(f"complexsusy: solver failure: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
