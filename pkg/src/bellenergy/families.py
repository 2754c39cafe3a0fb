"""Concrete inequality families and their measurement settings.

* ``tight8``: an 8-party ring inequality with range 2 violated by the
  settings (X, Y, Z) at every site.
* ``table2_rows``: a catalogue of violated TI range-2 ring inequalities with
  their classical bounds and quantum values.
* chained family: the m-setting chained inequality on every link of a
  ring, link weights alternating ``1 + eps`` and ``1 - eps``.
* random-coupling CHSH rings (spin-glass disorder).
* the elegant-inequality chain whose Bell operator is an XXZ chain.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .model import (
    PBC,
    BellInequality,
    BellScenario,
    MeasurementSettings,
    Term,
    inequality_from_dict,
    settings_from_dict,
)


def _data(name: str) -> dict:
    return json.loads(resources.files("bellenergy.data").joinpath(name).read_text(encoding="utf-8"))


# -- range-2 TI rings --------------------------------------------------------

def ti_range2(n: int, g: float, g1: dict, g2: dict) -> BellInequality:
    """TI ring with one-body weight ``g`` on Z, nearest-neighbour weights
    ``g1[(k, l)]`` and next-nearest weights ``g2[(k, l)]`` on ``M_k Z M_l``."""
    sc = BellScenario(n=n, m=2, d=2, R=2, boundary=PBC, ti=True, has_z=True)
    terms = [Term(0, 1, k, l, v) for (k, l), v in sorted(g1.items()) if v]
    terms += [Term(0, 2, k, l, v) for (k, l), v in sorted(g2.items()) if v]
    return BellInequality(sc, (g,), tuple(terms))


def tight8() -> BellInequality:
    return inequality_from_dict(_data("tight8.json"))


def xyz_settings() -> MeasurementSettings:
    """M_0 = X, M_1 = Y at every site (the third setting is always Z)."""
    return settings_from_dict(_data("xyz_settings.json"))


@dataclass(frozen=True)
class Table2Row:
    inequality: BellInequality
    beta_c: int
    qv: float
    angle: float
    qv_tolerance: float

    @property
    def n(self):
        return self.inequality.scenario.n

    @property
    def settings(self) -> MeasurementSettings:
        return MeasurementSettings.uniform((0.0, self.angle))


def table2_rows() -> list[Table2Row]:
    rows = []
    for r in _data("table2.json")["rows"]:
        g1 = {(0, 0): r["g00"], (0, 1): r["g01"], (1, 0): r["g10"], (1, 1): r["g11"]}
        g2 = {(0, 0): r["g020"], (0, 1): r["g021"], (1, 0): r["g120"], (1, 1): r["g121"]}
        ineq = ti_range2(r["n"], r["g"], g1, g2)
        rows.append(Table2Row(ineq, r["beta_c"], r["qv"], r["angle_over_pi"] * math.pi, r["qv_tolerance"]))
    return rows


# -- chained family ----------------------------------------------------------

def chained_link_terms(m: int) -> list[tuple[int, int, int]]:
    """``(k, l, sign)`` of the two-party chained expression with m settings.

    ``sum_j A_{m-j-2} B_j + A_{m-j-1} B_j`` with ``A_{-1} = -A_{m-1}``;
    its classical minimum is ``-2 (m - 1)``.
    """
    out = []
    for j in range(m):
        k = m - j - 2
        out.append((m - 1, j, -1) if k < 0 else (k, j, 1))
        out.append((m - j - 1, j, 1))
    return out


def chained_link_weight(i: int, eps: float) -> float:
    return 1.0 + eps if i % 2 == 0 else 1.0 - eps


def chained_inequality(m: int, pairs: int, eps: float) -> BellInequality:
    """Chained expression on every link of a ring of ``2 * pairs`` sites.

    Link ``(i, i + 1)`` carries weight ``1 + (-1)**i * eps``.
    """
    if m < 2 or pairs < 1:
        raise ValueError("chained family needs m >= 2 and at least one pair")
    n = 2 * pairs
    sc = BellScenario(n=n, m=m, d=2, R=1, boundary=PBC, ti=False, has_z=False)
    terms = []
    for i in range(n):
        w = chained_link_weight(i, eps)
        for k, l, sgn in chained_link_terms(m):
            terms.append(Term(i, 1, k, l, sgn * w))
    return BellInequality(sc, (), tuple(_merge(terms)))


def _merge(terms):
    acc = {}
    for t in terms:
        key = (t.i, t.r, t.k, t.l)
        acc[key] = acc.get(key, 0.0) + t.gamma
    return [Term(*key, g) for key, g in acc.items() if g]


def chained_settings(m: int) -> MeasurementSettings:
    """Planar settings maximizing a single chained pair.

    Setting ``k`` is ``sin(phi_k) X - cos(phi_k) Y`` with
    ``phi_k = (k + 1) pi / m``, i.e. planar angle ``phi_k - pi / 2``.
    """
    return MeasurementSettings.uniform(tuple((k + 1) * math.pi / m - math.pi / 2 for k in range(m)))


def chained_classical_bound(m: int, pairs: int, eps: float) -> float:
    return 4 * pairs * (m - 1) * max(1.0, abs(eps))


def chained_bound_default_params() -> dict:
    return _data("chained.json")


# -- random-coupling CHSH ring -----------------------------------------------

def coupling_ring(couplings) -> BellInequality:
    """CHSH expression on every ring link, link ``i`` weighted by ``couplings[i]``."""
    J = [float(x) for x in couplings]
    n = len(J)
    sc = BellScenario(n=n, m=2, d=2, R=1, boundary=PBC, ti=False, has_z=False)
    terms = [Term(i, 1, k, l, s * J[i]) for i in range(n) for k, l, s in chained_link_terms(2)]
    return BellInequality(sc, (), tuple(_merge(terms)))


# -- elegant-inequality XXZ chain ---------------------------------------------

def elegant_matrix(delta: float) -> np.ndarray:
    """4 x 3 weight matrix between the tetrahedron settings and (X, Y, Z)."""
    return np.array(
        [[1, 1, delta], [1, -1, -delta], [-1, 1, -delta], [-1, -1, delta]], dtype=float
    )


TETRAHEDRON = np.array([[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float) / math.sqrt(3)


def xxz_elegant_inequality(n: int, delta: float, eps: float) -> BellInequality:
    """Ring of ``n`` (even) sites; even sites have 4 settings, odd sites use 3.

    Link ``(2i, 2i + 1)`` carries ``(1 + eps) sum_{k,l} S[k, l] A_k B_l`` and
    link ``(2i + 1, 2i + 2)`` carries ``(1 - eps) sum_{k,l} S[k, l] B_l A_k``.
    Odd sites never use setting index 3.
    """
    if n < 2 or n % 2:
        raise ValueError("the elegant chain needs an even number of sites")
    S = elegant_matrix(delta)
    sc = BellScenario(n=n, m=4, d=2, R=1, boundary=PBC, ti=False, has_z=False)
    terms = []
    for i in range(n):
        w = chained_link_weight(i, eps)
        for k in range(4):
            for l in range(3):
                g = w * S[k, l]
                if g:
                    terms.append(Term(i, 1, k, l, g) if i % 2 == 0 else Term(i, 1, l, k, g))
    return BellInequality(sc, (), tuple(terms))


def xxz_pauli_couplings(n: int, delta: float, eps: float) -> np.ndarray:
    """``c[i, a, b]``: weight of sigma_a sigma_b on link ``(i, i + 1)``.

    Obtained by substituting the tetrahedron observables on even sites and
    X, Y, Z on odd sites into the elegant chain; equals
    ``(4 / sqrt 3)(1 + (-1)**i eps) diag(1, 1, delta)``.
    """
    S = elegant_matrix(delta)
    link = TETRAHEDRON.T @ S  # (pauli of A, pauli of B)
    out = np.zeros((n, 3, 3))
    for i in range(n):
        w = chained_link_weight(i, eps)
        out[i] = w * (link if i % 2 == 0 else link.T)
    return out


XXZ_REGIONS = ("I", "II", "III", "IV", "V", "VI", "VII", "VIII")


def xxz_region(delta: float, eps: float) -> str:
    """Region of the ``(|delta|, |eps|)`` plane that fixes the classical-bound formula."""
    D, e = abs(delta), abs(eps)
    if e <= 1:
        return "I" if D <= 2 else "II"
    if D <= 1:
        if e <= D + 1:
            return "III"
        return "V" if D < 1 and e > 1 / (1 - D) else "VI"
    if D <= 2:
        return "III" if D * e <= 2 else "VII"
    return "IV" if e <= D / 2 else "VIII"


def xxz_classical_minimum(n: int, delta: float, eps: float) -> float:
    """Closed-form classical minimum of the elegant chain for ``n = 0, 2 mod 4``."""
    if n % 2 or n < 4:
        raise ValueError("closed forms hold for even n > 2")
    D, e = abs(delta), abs(eps)
    reg = xxz_region(delta, eps)
    if n % 4 == 0:
        return {
            "I": -n * (4 + 2 * D),
            "II": -4 * n * D,
            "III": -n * e * (4 + 2 * D),
            "V": -n * e * (4 + 2 * D),
            "VI": -n * e * (4 + 2 * D),
            "VII": -n * e * (4 + 2 * D),
            "IV": -4 * n * e * D,
            "VIII": -4 * n * e * D,
        }[reg]
    return {
        "I": -n * (4 + 2 * D),
        "II": -4 * n * D,
        "III": -8 - 4 * D - (4 * n - 8) * e - (2 * n - 4) * D * e,
        "IV": -8 * D - (4 * n - 8) * e * D,
        "V": -4 * n * e - (2 * n - 8) * e * D,
        "VI": -4 - (4 * n - 4) * e - (2 * n - 4) * e * D,
        "VII": -4 * D - (4 * n - 8) * e - 2 * n * e * D,
        "VIII": -8 * e - 4 * D - (4 * n - 8) * e * D,
    }[reg]
