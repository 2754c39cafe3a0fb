"""Exact classical bounds of finite-range Bell inequalities.

Every deterministic local strategy assigns each site a *local state*
``s in [0, d**rows)``; the outcome of setting row ``k`` is digit ``k`` of
``s`` in base ``d`` (for ``d = 2`` digit 0 means outcome +1, so state 0 is
"all +1").  The Bell expression splits into per-site tables ``h_i`` over
the states of sites ``i .. i+R`` and is minimized by a sliding-window
dynamic program.

Sweeps run right to left so that the back-pointers rebuild, left to right,
the lexicographically smallest optimal strategy (site 0 most significant,
local states compared as integers).

Integer inequalities are solved entirely in int64 arithmetic; unreachable
entries hold ``SENTINEL``.  Weights that are short decimals (``0.3``,
``1.25``) are scaled to a common integer denominator first, so those
bounds are exact too.  Anything else runs in floating point with ``inf``
as the unreachable marker.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .model import OBC, PBC, BellInequality, DeterministicStrategy

SENTINEL = np.int64(2**61)
_INT_LIMIT = 2**60


@dataclass(frozen=True)
class BoundResult:
    """Minimum of the Bell expression over deterministic strategies.

    ``beta_c`` is reported with the opposite sign, so the inequality reads
    ``I + beta_c >= 0``.
    """

    classical_minimum: float
    witness: Optional[DeterministicStrategy] = None
    exact: bool = False

    @property
    def beta_c(self):
        return -self.classical_minimum


@dataclass(frozen=True, eq=False)
class TransferTable:
    """Min-plus transfer table between boundary configurations.

    ``table[x, y]`` is the cheapest way to go from boundary block ``x`` to
    boundary block ``y``; ``t`` counts how often the base table has been
    squared.
    """

    table: np.ndarray
    t: int = 0

    def __post_init__(self):
        if self.table.ndim != 2 or self.table.shape[0] != self.table.shape[1]:
            raise ValueError("transfer tables are square")


# -- scalar helpers --------------------------------------------------------

def _unreachable(dtype):
    return SENTINEL if np.issubdtype(dtype, np.integer) else np.inf


def _clamp(a):
    if np.issubdtype(a.dtype, np.integer):
        np.minimum(a, SENTINEL, out=a)
    return a


def common_denominator(gammas, max_den: int = 10**6) -> int | None:
    """Smallest ``L`` making every weight an integer, if the weights are short decimals."""
    L = 1
    for g in gammas:
        g = float(g)
        if g.is_integer():
            continue
        f = Fraction(g).limit_denominator(max_den)
        if float(f) != g:  # must round-trip exactly
            return None
        L = L * f.denominator // math.gcd(L, f.denominator)
        if L > max_den:
            return None
    return L


def _scale(ineq: BellInequality) -> int | None:
    """Integer scale for the exact path, or None for floating point."""
    L = common_denominator(ineq.gammas)
    if L is None:
        return None
    total = sum(abs(g) for g in ineq.gammas) * L
    if ineq.scenario.ti:
        total *= ineq.scenario.n
    if ineq.scenario.n * total >= _INT_LIMIT:
        if ineq.integral:
            raise ValueError("integer weights too large for the exact 64-bit path")
        return None
    return L


def _number(x, scale):
    if scale is None:
        return float(x)
    if scale == 1:
        return int(x)
    return float(Fraction(int(x), scale))


# -- local tables ----------------------------------------------------------

def outcome_table(rows: int, d: int) -> np.ndarray:
    """``(d**rows, rows)`` array of outcome labels per local state."""
    s = np.arange(d**rows)
    return (s[:, None] // d ** np.arange(rows)[None, :]) % d


def _factor_block(f, labels, d, R, dtype):
    """Table over ``R + 1`` local states holding one factor's contribution."""
    S = labels.shape[0]
    r = len(f.k) - 1
    out = np.asarray(f.gamma, dtype=dtype).reshape(())
    for j, k in enumerate(f.k):
        if f.a is None:
            v = (1 - 2 * labels[:, k]).astype(dtype)
        else:
            v = (labels[:, k] == f.a[j]).astype(dtype)
        out = out[..., None] * v
    return out.reshape((S,) * (r + 1) + (1,) * (R - r))


def site_tables(ineq: BellInequality, scale: int | None = None) -> np.ndarray:
    """Per-site tables ``h[i]`` of shape ``(S,) * (R + 1)``.

    ``h[i][s_i, ..., s_{i+R}]`` sums every weighted term that starts at
    site ``i``.  TI rings return a single table (leading axis 1).  With an
    integer ``scale`` the tables hold ``scale * gamma`` as int64.
    """
    sc = ineq.scenario
    dtype = float if scale is None else np.int64
    labels = outcome_table(sc.rows, sc.d)
    S = labels.shape[0]
    shared = sc.ti and sc.boundary == PBC
    count = 1 if shared else sc.n
    h = np.zeros((count,) + (S,) * (sc.R + 1), dtype=dtype)
    factors = ineq.site_factors() if shared else ineq.factors()
    for f in factors:
        if scale is not None:
            f = f._replace(gamma=round(f.gamma * scale))
        h[f.i] += _factor_block(f, labels, sc.d, sc.R, dtype)
    return h


# -- the sliding-window sweep ----------------------------------------------

def _sweep(tables, sizes, end, want_back):
    """Right-to-left sweep over positions ``0 .. len(tables) - 1``.

    ``tables[i]`` has shape ``(K, sizes[i], Q_i, sizes[i + R])`` where
    ``Q_i`` is the product of the sizes of positions ``i+1 .. i+R-1``; ``end``
    has shape ``(K, B, Q_n * sizes[n+R-1])`` and holds the cost of the
    final boundary block.  Returns the cost of the first block with shape
    ``(K, B, sizes[0] * Q_0)`` and the per-step back-pointers.
    """
    E = end
    back = []
    for i in range(len(tables) - 1, -1, -1):
        h = tables[i]
        K, S_i, Q, S_new = h.shape
        En = E.reshape(E.shape[0], E.shape[1], 1, Q, S_new)
        total = h[:, None] + En
        if want_back:
            arg = np.argmin(total, axis=-1)
            E = np.take_along_axis(total, arg[..., None], axis=-1)[..., 0]
            back.append(arg)
        else:
            E = total.min(axis=-1)
        E = _clamp(E.reshape(E.shape[0], E.shape[1], S_i * Q))
    back.reverse()
    return E, back


def _position_tables(h, sc, positions):
    """Reshape per-site tables into sweep form, slicing padded OBC positions."""
    R = sc.R
    S = h.shape[-1]
    size = lambda p: S if p < sc.n or sc.boundary == PBC else 1
    sizes = [size(p) for p in range(positions + R)]
    out = []
    for i in range(positions):
        t = h[i % h.shape[0]]
        idx = tuple(slice(None) if sizes[i + j] == S else slice(0, 1) for j in range(R + 1))
        t = t[idx]
        Q = int(np.prod(sizes[i + 1 : i + R], dtype=np.int64))
        out.append(t.reshape(1, sizes[i], Q, sizes[i + R]))
    return out, sizes


def _rebuild(X0, back, sizes, b, R):
    states = []
    X = int(X0)
    for i, bp in enumerate(back):
        Q = int(np.prod(sizes[i + 1 : i + R], dtype=np.int64))
        s_i, q = divmod(X, Q)
        snew = int(bp[0, b, s_i, q])
        states.append(s_i)
        X = q * sizes[i + R] + snew
    return states


def _strategy(states, sc):
    return DeterministicStrategy.from_local_states(states, sc.rows, sc.d)


def classical_bound_obc(ineq: BellInequality, witness: bool = True) -> BoundResult:
    """Exact minimum over deterministic strategies of an open-chain inequality.

    Cost is ``O(n * d**(rows * (R + 1)))``.

    Raises
    ------
    ValueError
        For ring inequalities.
    """
    sc = ineq.scenario
    if sc.boundary != OBC:
        raise ValueError("classical_bound_obc needs an open chain; use classical_bound_pbc")
    scale = _scale(ineq)
    h = site_tables(ineq, scale)
    tables, sizes = _position_tables(h, sc, sc.n)
    end = np.zeros((1, 1, 1), dtype=h.dtype)
    E, back = _sweep(tables, sizes, end, witness)
    X0 = int(np.argmin(E[0, 0]))
    value = E[0, 0, X0]
    w = _strategy(_rebuild(X0, back, sizes, 0, sc.R), sc) if witness else None
    return BoundResult(_number(value, scale), w, scale is not None)


def _ring_end(B, dtype):
    end = np.full((1, B, B), _unreachable(dtype), dtype=dtype)
    end[0, np.arange(B), np.arange(B)] = 0
    return end


def classical_bound_pbc(ineq: BellInequality, witness: bool = True) -> BoundResult:
    """Exact minimum for a ring inequality.

    The ring is unrolled to ``n + R`` positions; the last ``R`` positions are
    copies of sites ``0 .. R-1``.  Every boundary block ``b`` of those sites
    is swept as a separate batch entry and only runs that come back to
    ``b`` count.  Cost is ``O(n * d**(rows * (2R + 1)))``.
    """
    sc = ineq.scenario
    if sc.boundary != PBC:
        raise ValueError("classical_bound_pbc needs a ring; use classical_bound_obc")
    scale = _scale(ineq)
    h = site_tables(ineq, scale)
    tables, sizes = _position_tables(h, sc, sc.n)
    B = int(np.prod(sizes[: sc.R], dtype=np.int64))
    E, back = _sweep(tables, sizes, _ring_end(B, h.dtype), witness)
    closed = E[0, np.arange(B), np.arange(B)]
    b = int(np.argmin(closed))
    w = _strategy(_rebuild(b, back, sizes, b, sc.R), sc) if witness else None
    return BoundResult(_number(closed[b], scale), w, scale is not None)


def ring_minima(h: np.ndarray) -> np.ndarray:
    """Ring minima for a stack of instances sharing one structure.

    Parameters
    ----------
    h : ndarray, shape (K, n, S, ..., S)
        Per-instance, per-site tables with ``R + 1`` state axes.

    Returns
    -------
    ndarray, shape (K,)
        Classical minima, no witnesses.  Used for disorder averages where
        thousands of small chains share the same scenario.
    """
    K, n = h.shape[:2]
    S = h.shape[-1]
    R = h.ndim - 3
    B = S**R
    Q = S ** (R - 1)
    tables = [h[:, i].reshape(K, S, Q, S) for i in range(n)]
    end = np.broadcast_to(_ring_end(B, h.dtype), (K, B, B)).copy()
    E, _ = _sweep(tables, [S] * (n + R), end, False)
    return E[:, np.arange(B), np.arange(B)].min(axis=1)


# -- min-plus algebra ------------------------------------------------------

def min_plus_product(a: np.ndarray, b: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    """``c[x, y] = min_z a[x, z] + b[z, y]``, computed in row blocks."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"shape mismatch {a.shape} x {b.shape}")
    dtype = np.result_type(a, b)
    out = np.empty((a.shape[0], b.shape[1]), dtype=dtype)
    rows = max(1, chunk // max(1, a.shape[1] * b.shape[1]))
    for lo in range(0, a.shape[0], rows):
        blk = a[lo : lo + rows, :, None] + b[None, :, :]
        out[lo : lo + rows] = blk.min(axis=1)
    return _clamp(out)


def min_plus_square(t: TransferTable) -> TransferTable:
    """One doubling step: the table composed with itself."""
    return TransferTable(min_plus_product(t.table, t.table), t.t + 1)


def min_plus_identity(size: int, dtype=np.int64) -> np.ndarray:
    out = np.full((size, size), _unreachable(np.dtype(dtype)), dtype=dtype)
    np.fill_diagonal(out, 0)
    return out


# -- translation-invariant solver ------------------------------------------

def _block_tables(h_site, S, R, q):
    """Merge ``q`` consecutive sites into super-sites.

    Returns the super-site table over ``R' + 1`` super-sites, flattened to
    shape ``(S**q,) * (R' + 1)``, where ``R' = ceil(R / q)``.
    ``h_site[j]`` is the table of the ``j``-th site in a period.
    """
    Rb = -(-R // q)
    L = q * (Rb + 1)
    dtype = h_site.dtype
    total = np.zeros((S,) * L, dtype=dtype)
    for j in range(q):
        t = h_site[j].reshape((1,) * j + (S,) * (R + 1) + (1,) * (L - j - R - 1))
        total = total + t
    return total.reshape((S**q,) * (Rb + 1)), Rb


def _base_transfer(hb, Rb):
    """Cost of ``R' + 1`` windows from block ``x`` to block ``y`` (``f^(0)``)."""
    Sb = hb.shape[0]
    L = 2 * Rb + 1
    acc = np.zeros((Sb,) * L, dtype=hb.dtype)
    for t in range(Rb + 1):
        acc = acc + hb.reshape((1,) * t + (Sb,) * (Rb + 1) + (1,) * (L - t - Rb - 1))
    acc = acc.min(axis=Rb)
    X = Sb**Rb
    return acc.reshape(X, X)


def _window_transfer(hb, Rb):
    """Single-window step between overlapping blocks (shift by one super-site)."""
    Sb = hb.shape[0]
    X = Sb**Rb
    out = np.full((X, X), _unreachable(hb.dtype), dtype=hb.dtype)
    flat = hb.reshape(X, Sb)  # (old block, new super-site)
    q = np.arange(X) % (Sb ** (Rb - 1))
    for snew in range(Sb):
        out[np.arange(X), q * Sb + snew] = flat[:, snew]
    return out


def classical_bound_ti(ineq: BellInequality, period: int = 1) -> BoundResult:
    """Classical bound of a ring inequality by repeated min-plus squaring.

    Parameters
    ----------
    ineq : BellInequality
        Ring inequality.  It must be translation invariant, or invariant
        under shifts by ``period`` sites.
    period : int
        Length of the repeating unit.  ``period`` sites are merged into one
        super-site and the solver runs on the resulting TI chain.

    Returns
    -------
    BoundResult
        Without a witness.

    Notes
    -----
    With ``n'`` super-sites and range ``R'`` the ring is cut into
    ``w = n' // (R' + 1)`` groups of ``R' + 1`` windows and a tail of
    ``n' - w (R' + 1)`` windows.  The groups are composed from the binary
    digits of ``w`` using ``O(log n)`` squarings of the base table.  The
    tail is a sliding-window walk from the last boundary block back to the
    first one, so overlapping sites always agree.  Cost is
    ``O(log n * d**(3 rows R'))``.  Rings shorter than ``R' + 1`` super-sites
    go to the direct ring sweep.
    """
    sc = ineq.scenario
    if sc.boundary != PBC:
        raise ValueError("the doubling solver needs a ring")
    if period < 1 or sc.n % period:
        raise ValueError(f"period {period} does not divide n={sc.n}")
    scale = _scale(ineq)
    if sc.ti:
        h_site = np.repeat(site_tables(ineq, scale), period, axis=0)
    else:
        h_all = site_tables(ineq, scale)
        h_site = h_all[:period]
        if not all(np.array_equal(h_all[i], h_site[i % period]) for i in range(sc.n)):
            raise ValueError(
                "inequality is not invariant under shifts by "
                f"{period} site(s); pass the right period or use classical_bound_pbc"
            )
    S = h_site.shape[-1]
    hb, Rb = _block_tables(h_site, S, sc.R, period)
    n_b = sc.n // period
    if n_b < Rb + 1:  # too short to tile with windows; the direct sweep is cheap here
        return classical_bound_pbc(ineq, witness=False)
    w, rho = divmod(n_b, Rb + 1)
    f = TransferTable(_base_transfer(hb, Rb))
    G = None
    while True:
        if w & 1:
            G = f.table if G is None else min_plus_product(G, f.table)
        w >>= 1
        if not w:
            break
        f = min_plus_square(f)
    X = G.shape[0]
    tail = min_plus_identity(X, hb.dtype)
    step = _window_transfer(hb, Rb)
    for _ in range(rho):
        tail = min_plus_product(tail, step)
    closed = min_plus_product(G, tail)
    value = np.diagonal(closed).min()
    return BoundResult(_number(value, scale), None, scale is not None)


def classical_bound(ineq: BellInequality, witness: bool = True) -> BoundResult:
    """Dispatch to the open- or closed-chain solver."""
    if ineq.scenario.boundary == OBC:
        return classical_bound_obc(ineq, witness)
    return classical_bound_pbc(ineq, witness)
