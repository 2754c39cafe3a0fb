"""Reproducible end-to-end runs: solvers wired together over parameter grids.

Every run is a pure function of its arguments (and seed).  Grid outputs
can be written as CSV with ``#`` metadata lines.
"""

from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from . import __version__
from .classical_dp import classical_bound_pbc, classical_bound_ti, ring_minima, site_tables
from .families import (
    chained_classical_bound,
    chained_inequality,
    chained_settings,
    coupling_ring,
    table2_rows,
    tight8,
    xxz_classical_minimum,
    xxz_elegant_inequality,
    xxz_pauli_couplings,
    xxz_region,
    xyz_settings,
)
from .fermion import ground_energy
from .model import MeasurementSettings, SpinHamiltonian, compile_hamiltonian
from .oracle import MAX_QUBITS, dense_ground_energy, dense_pauli_chain
from .ti_analytic import (
    TiHamiltonianBlocks,
    chained_beta_q_per_particle,
    chained_classical_per_particle,
    chained_ground_energy,
    chained_violation_window,
    ti_ground_energy,
)


@dataclass(frozen=True)
class SweepSpec:
    """Parameter grid for a sweep.

    ``grid_a`` is the outer axis (mu, or delta), ``grid_b`` the inner one
    (sigma, or eps).  ``realizations`` and ``base_seed`` only matter for
    random couplings.
    """

    grid_a: tuple
    grid_b: tuple = ()
    n: int = 100
    realizations: int = 100
    base_seed: int = 0
    m: int = 2

    def __post_init__(self):
        for name in ("grid_a", "grid_b"):
            g = tuple(float(x) for x in getattr(self, name))
            object.__setattr__(self, name, g)
            if name == "grid_a" and not g:
                raise ValueError("grid_a must not be empty")
            if any(b <= a for a, b in zip(g, g[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.realizations < 1:
            raise ValueError("need at least one realization")
        if self.n < 2:
            raise ValueError("need at least two sites")


@dataclass(frozen=True)
class PhasePoint:
    """One grid point.

    For random couplings ``ratio`` is the mean over realizations of
    ``|E_0| / beta_C`` with its standard error; ``beta_c`` and ``e0`` are
    means too.  For deterministic sweeps ``stderr`` is 0.
    """

    a: float
    b: float
    beta_c: float
    e0: float
    ratio: float
    violation: float
    stderr: float = 0.0
    count: int = 1
    extra: dict = field(default_factory=dict)


# -- single-instance reports --------------------------------------------------

@dataclass(frozen=True)
class Check:
    name: str
    value: float
    expected: float
    tolerance: float

    @property
    def delta(self) -> float:
        return self.value - self.expected

    @property
    def ok(self) -> bool:
        return abs(self.delta) <= self.tolerance


@dataclass(frozen=True)
class Tight8Report:
    beta_c: int
    e0_odd: float
    e0_even: float
    violation: float
    seconds: float
    checks: tuple

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)


def run_tight8() -> Tight8Report:
    """Classical bound, both sector energies and the violation of the 8-party ring."""
    t0 = time.perf_counter()
    ineq, settings = tight8(), xyz_settings()
    beta = classical_bound_pbc(ineq, witness=False).beta_c
    rep = ground_energy(compile_hamiltonian(ineq, settings))
    viol = beta + rep.e0
    seconds = time.perf_counter() - t0
    s2 = math.sqrt(2)
    checks = (
        Check("beta_c", beta, 32, 0),
        Check("e0(p=-1)", rep.e0_per_parity[-1], -16 - 8 * s2, 1e-9),
        Check("e0(p=+1)", rep.e0_per_parity[1], -8 * (s2 + 2 * math.cos(math.pi / 8) + 2 * math.sin(math.pi / 8)), 1e-9),
        Check("violation", viol, -0.2187, 1e-3),
    )
    return Tight8Report(beta, rep.e0_per_parity[-1], rep.e0_per_parity[1], viol, seconds, checks)


@dataclass(frozen=True)
class Table2Check:
    index: int
    n: int
    beta_c: int
    beta_c_expected: int
    qv: float
    qv_expected: float
    qv_tolerance: float
    angle: float
    qv_closed_form: float
    best_angle: float
    best_qv: float

    @property
    def ok(self) -> bool:
        return self.beta_c == self.beta_c_expected and abs(self.qv - self.qv_expected) <= self.qv_tolerance


def _best_angle(ineq, beta, start):
    """Locally optimal angle difference near ``start`` (angle of M_0 fixed at 0)."""
    f = lambda a: ground_energy(compile_hamiltonian(ineq, MeasurementSettings.uniform((0.0, a)))).e0
    grid = np.linspace(0, 2 * math.pi, 65)
    vals = [f(a) for a in grid]
    a0 = grid[int(np.argmin(vals))] if min(vals) < f(start) else start
    r = minimize_scalar(f, bounds=(a0 - 0.1, a0 + 0.1), method="bounded", options={"xatol": 1e-10})
    return float(r.x % (2 * math.pi)), beta + float(r.fun)


def verify_table2(optimize: bool = True) -> list[Table2Check]:
    """Recompute bound and quantum value of every catalogued TI inequality."""
    out = []
    for idx, row in enumerate(table2_rows()):
        ineq = row.inequality
        beta = classical_bound_ti(ineq).beta_c
        h = compile_hamiltonian(ineq, row.settings)
        qv = beta + ground_energy(h).e0
        qv_cf = beta + ti_ground_energy(TiHamiltonianBlocks.from_hamiltonian(h)).e0
        best = _best_angle(ineq, beta, row.angle) if optimize else (row.angle, qv)
        out.append(Table2Check(idx, row.n, beta, row.beta_c, qv, row.qv, row.qv_tolerance, row.angle, qv_cf, *best))
    return out


# -- chained family ------------------------------------------------------------

@dataclass(frozen=True)
class ChainedRow:
    eps: float
    beta_c: float
    beta_c_formula: float
    e0: float
    e0_numeric: float
    violation: float
    beta_q_per_site: float
    beta_c_per_site: float


@dataclass(frozen=True)
class ChainedReport:
    m: int
    pairs: int
    rows: tuple
    window: tuple


def run_chained(m: int, pairs: int, eps_grid, numeric: bool = True) -> ChainedReport:
    """Classical bound (DP), quantum value (closed form) and long-chain limits per eps."""
    rows = []
    settings = chained_settings(m)
    for eps in eps_grid:
        eps = float(eps)
        ineq = chained_inequality(m, pairs, eps)
        beta = classical_bound_ti(ineq, period=2).beta_c
        e0 = chained_ground_energy(m, pairs, eps).e0
        e_num = ground_energy(compile_hamiltonian(ineq, settings)).e0 if numeric else float("nan")
        rows.append(
            ChainedRow(
                eps, beta, chained_classical_bound(m, pairs, eps), e0, e_num, beta + e0,
                chained_beta_q_per_particle(m, eps), chained_classical_per_particle(m, eps),
            )
        )
    return ChainedReport(m, pairs, tuple(rows), chained_violation_window(m))


# -- random couplings ---------------------------------------------------------

def gaussian_couplings(n: int, mu: float, sigma: float, key) -> np.ndarray:
    """``n`` normal draws by Box-Muller on a Philox counter stream seeded with ``key``."""
    bitgen = np.random.Philox(np.random.SeedSequence(list(key)))
    half = (n + 1) // 2
    raw = bitgen.random_raw(2 * half)
    u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53
    u1, u2 = u[:half], u[half:]
    rad = np.sqrt(-2.0 * np.log(u1))
    z = np.concatenate([rad * np.cos(2 * math.pi * u2), rad * np.sin(2 * math.pi * u2)])[:n]
    return mu + sigma * z


def _link_string(m: int) -> np.ndarray:
    """String coefficients of one unit-weight CHSH link under the chained settings."""
    unit = coupling_ring([1.0, 0.0])
    return compile_hamiltonian(unit, chained_settings(m)).strings[0, 0]


def _link_table() -> np.ndarray:
    return site_tables(coupling_ring([1.0, 0.0]))[0].astype(float)


def _spin_glass_point(args):
    spec, ia, ib = args
    mu, sigma = spec.grid_a[ia], spec.grid_b[ib]
    n, R = spec.n, spec.realizations
    T = _link_string(spec.m)
    J = np.stack([gaussian_couplings(n, mu, sigma, (spec.base_seed, ia, ib, r)) for r in range(R)])
    beta = -ring_minima(J[:, :, None, None] * _link_table())
    e0 = np.empty(R)
    for r in range(R):
        st = (J[r, :, None, None] * T)[:, None]
        e0[r] = ground_energy(SpinHamiltonian(n, 1, "pbc", np.zeros(n), st)).e0
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.abs(e0) / beta
    err = float(ratio.std(ddof=1) / math.sqrt(R)) if R > 1 else 0.0
    return PhasePoint(
        mu, sigma, float(beta.mean()), float(e0.mean()), float(ratio.mean()),
        float((beta + e0).mean()), err, R,
    )


def run_spin_glass(spec: SweepSpec, threads: int = 1) -> list[PhasePoint]:
    """Disorder-averaged ``|E_0| / beta_C`` on a (mu, sigma) grid.

    Couplings of realization ``r`` at grid index ``(i, j)`` come from the
    seed ``(base_seed, i, j, r)`` only, so results do not depend on
    scheduling or thread count.  Only CHSH links (``m = 2``) are supported.
    """
    if spec.m != 2:
        raise ValueError("random-coupling rings use CHSH links (m = 2)")
    if not spec.grid_b:
        raise ValueError("spin-glass sweeps need a sigma grid")
    jobs = [(spec, ia, ib) for ia in range(len(spec.grid_a)) for ib in range(len(spec.grid_b))]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_spin_glass_point, jobs, chunksize=4))
    return [_spin_glass_point(j) for j in jobs]


SPIN_GLASS_MU = tuple(round(0.2 * k, 10) for k in range(-9, 11))
SPIN_GLASS_SIGMA = tuple(round(0.1 * k, 10) for k in range(1, 21))


# -- elegant XXZ chain -------------------------------------------------------

def run_xxz_elegant(n: int, delta_grid, eps_grid, quantum: bool = True) -> list[PhasePoint]:
    """Classical minimum (DP and closed form) and, for small rings, the quantum value.

    ``extra`` holds the region label, the closed-form minimum and whether it
    matches the DP exactly.
    """
    if n % 2:
        raise ValueError("the elegant chain needs even n")
    if quantum and n > MAX_QUBITS:
        raise ValueError(f"quantum side is capped at n = {MAX_QUBITS}")
    out = []
    for d in delta_grid:
        for e in eps_grid:
            d, e = float(d), float(e)
            cmin = classical_bound_pbc(xxz_elegant_inequality(n, d, e), witness=False).classical_minimum
            formula = xxz_classical_minimum(n, d, e) if n >= 4 else float("nan")
            e0 = dense_ground_energy(dense_pauli_chain(xxz_pauli_couplings(n, d, e))) if quantum else float("nan")
            beta = -cmin
            ratio = abs(e0) / beta if beta else float("nan")
            out.append(
                PhasePoint(d, e, beta, e0, ratio, beta + e0,
                           extra={"region": xxz_region(d, e), "formula": formula, "match": cmin == formula})
            )
    return out


XXZ_DELTA = (-3.0, -1.5, -0.5, 0.0, 0.5, 1.0, 1.5, 2.5, 4.0)
XXZ_EPS = (-2.0, -0.5, 0.0, 0.5, 1.0, 1.25, 2.0, 3.0, 5.0)


# -- CSV ---------------------------------------------------------------------

def format_number(x, digits: int = 10) -> str:
    """Ten significant digits; integers print without a decimal point."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x) or math.isinf(x):
        return str(x)
    if x.is_integer() and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.{digits}g}"


def phase_rows(points) -> tuple[list[str], list[list]]:
    if not points:
        return [], []
    extra_keys = sorted(points[0].extra)
    header = ["a", "b", "beta_c", "e0", "ratio", "violation", "stderr", "count"] + extra_keys
    rows = []
    for p in points:
        d = asdict(p)
        rows.append([d[k] for k in header[:8]] + [p.extra[k] for k in extra_keys])
    return header, rows


def write_csv(path, header, rows, meta: dict | None = None) -> str:
    """Write (and return) CSV text; ``meta`` becomes leading ``#`` lines."""
    buf = io.StringIO()
    for k, v in (meta or {}).items():
        buf.write(f"# {k}: {v}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([format_number(x) for x in r])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


def run_meta(command: str, **params) -> dict:
    meta = {"command": command, "version": __version__}
    meta.update({k: v for k, v in params.items() if v is not None})
    return meta
