"""Command-line front end.

Exit status: 0 on success, 1 on bad input (one-line diagnostic on stderr),
2 when a verification step finds a mismatch.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import os
import sys
from importlib import resources

import numpy as np

from . import __version__
from .classical_dp import classical_bound, classical_bound_ti
from .experiments import (
    SPIN_GLASS_MU,
    SPIN_GLASS_SIGMA,
    XXZ_DELTA,
    XXZ_EPS,
    SweepSpec,
    format_number,
    phase_rows,
    run_chained,
    run_meta,
    run_spin_glass,
    run_tight8,
    run_xxz_elegant,
    verify_table2,
    write_csv,
)
from .families import chained_bound_default_params
from .fermion import ground_energy
from .model import compile_hamiltonian, inequality_from_dict, settings_from_dict
from .oracle import MAX_STRATEGIES, dense_bell_operator, dense_ground_energy, exhaustive_classical_bound
from .ti_analytic import TiHamiltonianBlocks, ti_ground_energy

CROSS_CHECK_MAX_N = 12


class InputError(Exception):
    pass


class VerificationError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(message)


# -- input helpers -------------------------------------------------------------

FIXTURE_ALIASES = {"xyz": "xyz_settings"}


def _fixture_text(path):
    """Bundled fixture named by ``path`` (``tight8``, ``tight8.json``, ...), or None."""
    stem = os.path.basename(str(path))
    stem = stem[:-5] if stem.endswith(".json") else stem
    res = resources.files("bellenergy.data").joinpath(FIXTURE_ALIASES.get(stem, stem) + ".json")
    return res.read_text(encoding="utf-8") if res.is_file() else None


def _read_json(path):
    """Parse a JSON file; missing files fall back to bundled fixtures of the same name."""
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        text = _fixture_text(path) if isinstance(exc, FileNotFoundError) else None
        if text is None:
            raise InputError(f"{path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _load(path, parse, what):
    if path is None:
        raise InputError(f"--{what} is required for this command")
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}:1:1: expected a JSON object")
    try:
        return parse(data)
    except (ValueError, TypeError, KeyError) as exc:
        raise InputError(f"{path}: {exc}") from None


def _parse_axis(text):
    text = text.strip()
    if ":" in text:
        parts = [float(x) for x in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0:
            raise InputError(f"range {text!r} must be lo:hi:step with step > 0")
        lo, hi, step = parts
        count = int(np.floor((hi - lo) / step + 1e-9)) + 1
        return tuple(round(lo + k * step, 12) for k in range(count))
    return tuple(float(x) for x in text.split(",") if x.strip())


def parse_grid(text):
    """``"a-axis;b-axis"``; each axis is ``v1,v2,...`` or ``lo:hi:step``."""
    try:
        return tuple(_parse_axis(ax) for ax in text.split(";"))
    except ValueError as exc:
        raise InputError(f"bad --grid {text!r}: {exc}") from None


# -- output helpers --------------------------------------------------------------

def _emit(lines, args, payload, header=None, rows=None, meta=None):
    for key, value in lines:
        print(f"{key} = {format_number(value)}")
    meta = None if args.no_meta else dict(meta or {}, generated=_dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds"))
    if args.csv:
        if header is None:
            header, rows = [k for k, _ in lines], [[v for _, v in lines]]
        write_csv(args.csv, header, rows, meta)
    if args.json:
        doc = {"results": _jsonable(payload)}
        if meta:
            doc["meta"] = meta
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    return x


def _check(ok, message):
    if not ok:
        raise VerificationError(message)


# -- commands ------------------------------------------------------------------

def cmd_bound(args):
    ineq = _load(args.ineq, inequality_from_dict, "ineq")
    sc = ineq.scenario
    if args.ti:
        res = classical_bound_ti(ineq)
    else:
        res = classical_bound(ineq)
    if args.cross_check and sc.n <= CROSS_CHECK_MAX_N:
        other = classical_bound(ineq, witness=False) if args.ti else None
        if other is not None:
            _check(other.classical_minimum == res.classical_minimum,
                   f"fast and generic bounds differ: {res.classical_minimum} vs {other.classical_minimum}")
        if sc.local_states**sc.n <= MAX_STRATEGIES:
            ex = exhaustive_classical_bound(ineq)
            _check(ex.classical_minimum == res.classical_minimum,
                   f"DP and enumeration differ: {res.classical_minimum} vs {ex.classical_minimum}")
    payload = {"beta_c": res.beta_c, "classical_minimum": res.classical_minimum}
    if res.witness is not None:
        payload["witness"] = res.witness.values.tolist()
    _emit([("beta_c", res.beta_c), ("classical_minimum", res.classical_minimum)], args, payload,
          meta=run_meta("bound", ineq=args.ineq))


def _energy(args):
    ineq = _load(args.ineq, inequality_from_dict, "ineq")
    settings = _load(args.settings, settings_from_dict, "settings")
    try:
        h = compile_hamiltonian(ineq, settings)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.ti:
        try:
            rep = ti_ground_energy(TiHamiltonianBlocks.from_hamiltonian(h))
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        rep = ground_energy(h)
    if args.cross_check and ineq.scenario.n <= CROSS_CHECK_MAX_N:
        ref = ground_energy(h).e0 if args.ti else dense_ground_energy(dense_bell_operator(ineq, settings))
        _check(abs(ref - rep.e0) <= 1e-8 * max(1.0, abs(ref)), f"ground energies differ: {rep.e0} vs {ref}")
    return ineq, rep


def cmd_energy(args):
    _, rep = _energy(args)
    lines = [("e0", rep.e0), ("e0_even", rep.e0_per_parity[1]), ("e0_odd", rep.e0_per_parity[-1])]
    _emit(lines, args, dict(lines), meta=run_meta("energy", ineq=args.ineq, settings=args.settings))


def cmd_violation(args):
    ineq, rep = _energy(args)
    beta = (classical_bound_ti(ineq) if args.ti else classical_bound(ineq, witness=False)).beta_c
    lines = [("violation", beta + rep.e0), ("beta_c", beta), ("e0", rep.e0)]
    _emit(lines, args, dict(lines), meta=run_meta("violation", ineq=args.ineq, settings=args.settings))


def cmd_tight8(args):
    rep = run_tight8()
    lines = [("beta_c", rep.beta_c), ("e0_odd", rep.e0_odd), ("e0_even", rep.e0_even), ("violation", rep.violation)]
    payload = {c.name: {"value": c.value, "expected": c.expected, "ok": c.ok} for c in rep.checks}
    _emit(lines, args, payload, meta=run_meta("tight8"))
    _check(rep.ok, "tight8 values off: " + ", ".join(f"{c.name} delta {c.delta:.3g}" for c in rep.checks if not c.ok))


def cmd_table2(args):
    checks = verify_table2()
    header = ["row", "n", "beta_c", "beta_c_expected", "qv", "qv_expected", "angle", "best_angle", "best_qv", "ok"]
    rows = [[c.index, c.n, c.beta_c, c.beta_c_expected, c.qv, c.qv_expected, c.angle, c.best_angle, c.best_qv, c.ok]
            for c in checks]
    for r in rows:
        print("  ".join(f"{h}={format_number(v)}" for h, v in zip(header, r)))
    _emit([], args, [dict(zip(header, r)) for r in rows], header, rows, run_meta("table2"))
    bad = [c.index for c in checks if not c.ok]
    _check(not bad, f"table rows {bad} do not reproduce")


def cmd_chained(args):
    params = chained_bound_default_params() if args.ineq is None else _read_json(args.ineq)
    m = int(args.m or params["m"])
    pairs = int(args.pairs or params["pairs"])
    grid = parse_grid(args.grid)[0] if args.grid else tuple(params["eps_grid"])
    rep = run_chained(m, pairs, grid, numeric=2 * pairs <= 400)
    header = ["eps", "beta_c", "beta_c_formula", "e0", "e0_numeric", "violation", "beta_q_per_site", "beta_c_per_site"]
    rows = [[getattr(r, h) for h in header] for r in rep.rows]
    for r in rows:
        print("  ".join(f"{h}={format_number(v)}" for h, v in zip(header, r)))
    lines = [("window_low", rep.window[0]), ("window_high", rep.window[1])] if rep.window else []
    _emit(lines, args, {"rows": [dict(zip(header, r)) for r in rows], "window": list(rep.window)},
          header, rows, run_meta("chained", m=m, pairs=pairs))
    _check(all(r.beta_c == r.beta_c_formula for r in rep.rows), "DP bound differs from the closed form")


def cmd_spinglass(args):
    grid = parse_grid(args.grid) if args.grid else (SPIN_GLASS_MU, SPIN_GLASS_SIGMA)
    if len(grid) != 2:
        raise InputError("spinglass --grid needs 'mu-axis;sigma-axis'")
    try:
        spec = SweepSpec(grid[0], grid[1], n=args.n or 100, realizations=args.realizations or 100,
                         base_seed=args.seed or 0)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    pts = run_spin_glass(spec, threads=args.threads or 1)
    header, rows = phase_rows(pts)
    header = ["mu", "sigma"] + header[2:]
    for p in pts:
        print(f"mu={format_number(p.a)}  sigma={format_number(p.b)}  ratio={format_number(p.ratio)}  "
              f"stderr={format_number(p.stderr)}")
    _emit([], args, [dict(zip(header, r)) for r in rows], header, rows,
          run_meta("spinglass", n=spec.n, realizations=spec.realizations, seed=spec.base_seed))


def cmd_xxz(args):
    grid = parse_grid(args.grid) if args.grid else (XXZ_DELTA, XXZ_EPS)
    if len(grid) != 2:
        raise InputError("xxz --grid needs 'delta-axis;eps-axis'")
    n = args.n or 8
    try:
        pts = run_xxz_elegant(n, grid[0], grid[1], quantum=n <= 14)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    header, rows = phase_rows(pts)
    header = ["delta", "eps"] + header[2:]
    for p in pts:
        print(f"delta={format_number(p.a)}  eps={format_number(p.b)}  region={p.extra['region']}  "
              f"classical_minimum={format_number(-p.beta_c)}  e0={format_number(p.e0)}  "
              f"violation={format_number(p.violation)}")
    _emit([], args, [dict(zip(header, r)) for r in rows], header, rows, run_meta("xxz", n=n))
    bad = [(p.a, p.b) for p in pts if not p.extra["match"]]
    _check(not bad, f"DP differs from the region formulas at {bad}")


def cmd_oracle_check(args):
    ineq = _load(args.ineq, inequality_from_dict, "ineq")
    sc = ineq.scenario
    lines = []
    res = classical_bound(ineq)
    lines.append(("beta_c", res.beta_c))
    if sc.local_states**sc.n <= MAX_STRATEGIES:
        ex = exhaustive_classical_bound(ineq)
        lines.append(("beta_c_exhaustive", ex.beta_c))
        _check(ex.classical_minimum == res.classical_minimum, "DP and enumeration differ")
    if args.settings is not None and sc.n <= CROSS_CHECK_MAX_N:
        settings = _load(args.settings, settings_from_dict, "settings")
        e_ff = ground_energy(compile_hamiltonian(ineq, settings)).e0
        e_dense = dense_ground_energy(dense_bell_operator(ineq, settings))
        lines += [("e0", e_ff), ("e0_dense", e_dense)]
        _check(abs(e_ff - e_dense) <= 1e-8 * max(1.0, abs(e_dense)), "free-fermion and dense energies differ")
    _emit(lines, args, dict(lines), meta=run_meta("oracle-check", ineq=args.ineq, settings=args.settings))


COMMANDS = {
    "bound": cmd_bound,
    "energy": cmd_energy,
    "violation": cmd_violation,
    "chained": cmd_chained,
    "spinglass": cmd_spinglass,
    "xxz": cmd_xxz,
    "tight8": cmd_tight8,
    "table2": cmd_table2,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="bellenergy", description="Classical bounds and ground-state violations of 1D Bell inequalities.")
    p.add_argument("--version", action="version", version=f"bellenergy {__version__}")
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--ineq", help="inequality JSON (chained: parameter JSON)")
    p.add_argument("--settings", help="measurement settings JSON")
    p.add_argument("--ti", action="store_true", help="use the translation-invariant solvers")
    p.add_argument("--cross-check", action="store_true", help="compare against generic or brute-force solvers")
    p.add_argument("--seed", type=int, help="base seed for random couplings")
    p.add_argument("--realizations", type=int, help="disorder realizations per grid point")
    p.add_argument("--grid", help="'v1,v2,...' or 'lo:hi:step'; two axes separated by ';'")
    p.add_argument("--n", type=int, help="number of sites (spinglass, xxz)")
    p.add_argument("--m", type=int, help="settings per site (chained)")
    p.add_argument("--pairs", type=int, help="site pairs (chained)")
    p.add_argument("--csv", help="write results as CSV")
    p.add_argument("--json", help="write results as JSON")
    p.add_argument("--threads", type=int, help="worker processes")
    p.add_argument("--no-meta", action="store_true", help="omit '#' metadata and timestamps")
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        for name in ("realizations", "threads", "n", "m", "pairs"):
            v = getattr(args, name)
            if v is not None and v < 1:
                raise InputError(f"--{name} must be positive")
        COMMANDS[args.command](args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"error: {str(exc).splitlines()[0] if str(exc) else exc!r}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
