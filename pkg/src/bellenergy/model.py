"""Bell scenarios, finite-range inequalities, qubit settings and spin Hamiltonians.

A Bell inequality here is ``I + beta_C >= 0`` where ``I`` is a sum of
correlators over blocks of at most ``R + 1`` contiguous parties on a ring
(PBC) or a line (OBC).  Two storage forms exist:

* the *structured* form: one-body weights on the z-measurement plus
  two-ended correlators ``M_(k, z, ..., z, l)`` whose interior parties
  measure z, and
* the *generic* form: arbitrary setting vectors, optionally in
  probability form (outcome vectors attached) which is required for d > 2.

Sites are always stored 0..n-1; ring wrap is applied when evaluating.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple, Sequence

import numpy as np

OBC = "obc"
PBC = "pbc"


@dataclass(frozen=True)
class BellScenario:
    """Party count, settings, outcomes, range and boundary of an inequality.

    ``m`` counts the planar settings.  With ``has_z`` an extra setting with
    index ``m`` is the z-measurement, so a local strategy has ``m + 1``
    rows.
    """

    n: int
    m: int
    d: int = 2
    R: int = 1
    boundary: str = PBC
    ti: bool = False
    has_z: bool = True

    def __post_init__(self):
        if self.n < 2 or self.m < 1 or self.d < 2 or self.R < 1:
            raise ValueError(f"invalid scenario sizes: {self}")
        if self.boundary not in (OBC, PBC):
            raise ValueError(f"boundary must be 'obc' or 'pbc', got {self.boundary!r}")
        if self.R >= self.n:
            raise ValueError(f"range R={self.R} must be smaller than n={self.n}")

    @property
    def rows(self) -> int:
        return self.m + int(self.has_z)

    @property
    def z_index(self) -> int | None:
        return self.m if self.has_z else None

    @property
    def local_states(self) -> int:
        return self.d ** self.rows


class Term(NamedTuple):
    """Weight ``gamma`` on ``M_(k, z, ..., z, l)`` from site ``i`` to ``i + r``."""

    i: int
    r: int
    k: int
    l: int
    gamma: float


class GeneralTerm(NamedTuple):
    """Weight on a generic correlator (``a is None``) or joint probability.

    ``k`` (and ``a``) hold one entry per party of the block ``i..i+r``.
    """

    i: int
    r: int
    k: tuple
    gamma: float
    a: tuple | None = None


class Factor(NamedTuple):
    i: int
    k: tuple
    a: tuple | None
    gamma: float


def _as_number(x):
    x = float(x)
    return int(x) if x.is_integer() else x


@dataclass(frozen=True)
class BellInequality:
    scenario: BellScenario
    one_body: tuple = ()
    terms: tuple = ()
    general_terms: tuple = ()

    def __post_init__(self):
        sc = self.scenario
        object.__setattr__(self, "one_body", tuple(float(g) for g in self.one_body))
        object.__setattr__(self, "terms", tuple(Term(*t) for t in self.terms))
        object.__setattr__(
            self,
            "general_terms",
            tuple(
                GeneralTerm(t[0], t[1], tuple(t[2]), t[3], None if len(t) < 5 or t[4] is None else tuple(t[4]))
                for t in self.general_terms
            ),
        )
        if (self.terms or any(self.one_body)) and self.general_terms:
            raise ValueError("an inequality is either structured or generic, not both")
        expected = 1 if sc.ti else sc.n
        if self.one_body and len(self.one_body) != expected:
            raise ValueError(f"one_body needs {expected} entries, got {len(self.one_body)}")
        if self.structured:
            self._check_structured()
        else:
            self._check_generic()

    # -- validation -------------------------------------------------------
    def _check_site(self, i, r):
        sc = self.scenario
        if sc.ti:
            if i != 0:
                raise ValueError("translationally invariant terms are stored once, with i = 0")
            return
        if not 0 <= i < sc.n:
            raise ValueError(f"site {i} outside 0..{sc.n - 1}")
        if sc.boundary == OBC and i + r >= sc.n:
            raise ValueError(f"OBC term at site {i} with range {r} leaves the chain")

    def _check_structured(self):
        sc = self.scenario
        if sc.d != 2 and (self.terms or any(self.one_body)):
            raise ValueError("correlator form needs d = 2; use probability-form general terms")
        if not sc.has_z:
            if any(t.r > 1 for t in self.terms):
                raise ValueError("terms with r > 1 need the z-measurement (has_z)")
            if any(self.one_body):
                raise ValueError("one-body z weights need has_z")
        for t in self.terms:
            if not 1 <= t.r <= sc.R:
                raise ValueError(f"term range {t.r} outside 1..{sc.R}")
            if not (0 <= t.k < sc.m and 0 <= t.l < sc.m):
                raise ValueError(f"setting index out of range in {t}")
            self._check_site(t.i, t.r)

    def _check_generic(self):
        sc = self.scenario
        for t in self.general_terms:
            if not 0 <= t.r <= sc.R:
                raise ValueError(f"term range {t.r} outside 0..{sc.R}")
            if len(t.k) != t.r + 1 or any(not 0 <= k < sc.rows for k in t.k):
                raise ValueError(f"bad setting vector in {t}")
            if t.a is None:
                if sc.d != 2:
                    raise ValueError("correlators are undefined for d > 2; give outcome vectors")
            elif len(t.a) != t.r + 1 or any(not 0 <= a < sc.d for a in t.a):
                raise ValueError(f"bad outcome vector in {t}")
            self._check_site(t.i, t.r)

    # -- views ------------------------------------------------------------
    @property
    def structured(self) -> bool:
        return not self.general_terms

    @property
    def gammas(self) -> list:
        out = list(self.one_body)
        out += [t.gamma for t in self.terms]
        out += [t.gamma for t in self.general_terms]
        return out

    @property
    def integral(self) -> bool:
        return all(float(g).is_integer() for g in self.gammas)

    def _base_factors(self) -> list[Factor]:
        """Factors anchored at site 0 (TI) or at their own site."""
        sc = self.scenario
        z = sc.z_index
        out = []
        for i, g in enumerate(self.one_body):
            if g:
                out.append(Factor(i, (z,), None, g))
        for t in self.terms:
            if t.gamma:
                out.append(Factor(t.i, (t.k,) + (z,) * (t.r - 1) + (t.l,), None, t.gamma))
        for t in self.general_terms:
            if t.gamma:
                out.append(Factor(t.i, t.k, t.a, t.gamma))
        return out

    def factors(self) -> Iterator[Factor]:
        """Every weighted term with its concrete (unwrapped) start site."""
        base = self._base_factors()
        sc = self.scenario
        if not sc.ti:
            yield from base
            return
        for i in range(sc.n):
            for f in base:
                if sc.boundary == OBC and i + len(f.k) > sc.n:
                    continue
                yield f._replace(i=i)

    def site_factors(self) -> list[Factor]:
        """TI only: the factors starting at site 0."""
        if not self.scenario.ti:
            raise ValueError("site_factors is defined for TI inequalities")
        return self._base_factors()

    def with_gammas(self, scale: float) -> "BellInequality":
        return BellInequality(
            self.scenario,
            tuple(scale * g for g in self.one_body),
            tuple(t._replace(gamma=scale * t.gamma) for t in self.terms),
            tuple(t._replace(gamma=scale * t.gamma) for t in self.general_terms),
        )

    def expanded(self) -> "BellInequality":
        """Same inequality with TI coefficients written out per site."""
        sc = self.scenario
        if not sc.ti:
            return self
        keep = lambda i, r: sc.boundary == PBC or i + r < sc.n
        ob = tuple(self.one_body) * sc.n if self.one_body else ()
        terms = tuple(t._replace(i=i) for i in range(sc.n) for t in self.terms if keep(i, t.r))
        gen = tuple(t._replace(i=i) for i in range(sc.n) for t in self.general_terms if keep(i, t.r))
        return BellInequality(_replace(sc, ti=False), ob, terms, gen)


def _replace(sc: BellScenario, **kw) -> BellScenario:
    d = dict(n=sc.n, m=sc.m, d=sc.d, R=sc.R, boundary=sc.boundary, ti=sc.ti, has_z=sc.has_z)
    d.update(kw)
    return BellScenario(**d)


@dataclass(frozen=True)
class MeasurementSettings:
    """Planar angles per site: setting k is cos(phi_k) X + sin(phi_k) Y.

    The setting with index ``m`` (when the scenario has it) is always Z.
    ``shared`` settings store a single list used at every site.
    """

    angles: tuple
    shared: bool = True

    def __post_init__(self):
        object.__setattr__(self, "angles", tuple(tuple(float(a) for a in row) for row in self.angles))
        if self.shared and len(self.angles) != 1:
            raise ValueError("shared settings hold exactly one angle list")
        if len({len(row) for row in self.angles}) > 1:
            raise ValueError("every site needs the same number of angles")

    @classmethod
    def uniform(cls, angles: Sequence[float]) -> "MeasurementSettings":
        return cls((tuple(angles),), shared=True)

    def for_site(self, i: int) -> tuple:
        return self.angles[0] if self.shared else self.angles[i]

    def check(self, scenario: BellScenario):
        if len(self.angles[0]) != scenario.m:
            raise ValueError(f"settings give {len(self.angles[0])} angles per site, scenario has m={scenario.m}")
        if not self.shared and len(self.angles) != scenario.n:
            raise ValueError(f"settings cover {len(self.angles)} sites, scenario has n={scenario.n}")

    def rotated(self, delta: float) -> "MeasurementSettings":
        return MeasurementSettings(tuple(tuple(a + delta for a in row) for row in self.angles), self.shared)


@dataclass(frozen=True, eq=False)
class SpinHamiltonian:
    """``sum_i t_i Z_i + sum_{i,r,a,b} t[i, r-1, a, b] Str^(i,r)_{a,b}``.

    ``Str^(i,r)_{a,b}`` is sigma_{x+a} on site i, Z on the sites strictly
    between, sigma_{x+b} on site i + r (mod n).
    """

    n: int
    R: int
    boundary: str
    one_body: np.ndarray
    strings: np.ndarray

    def __post_init__(self):
        ob = np.array(self.one_body, dtype=float).reshape(self.n)
        st = np.array(self.strings, dtype=float).reshape(self.n, self.R, 2, 2)
        if self.boundary == OBC:
            for i in range(self.n):
                for r in range(1, self.R + 1):
                    if i + r >= self.n and np.any(st[i, r - 1]):
                        raise ValueError(f"OBC Hamiltonian has a string leaving the chain at site {i}")
        ob.setflags(write=False)
        st.setflags(write=False)
        object.__setattr__(self, "one_body", ob)
        object.__setattr__(self, "strings", st)

    @classmethod
    def zeros(cls, n, R, boundary=PBC):
        return cls(n, R, boundary, np.zeros(n), np.zeros((n, R, 2, 2)))

    @property
    def crosses_origin(self) -> bool:
        if self.boundary == OBC:
            return False
        return any(np.any(self.strings[i, r - 1]) for i in range(self.n) for r in range(1, self.R + 1) if i + r >= self.n)

    def __add__(self, other: "SpinHamiltonian") -> "SpinHamiltonian":
        if (self.n, self.R, self.boundary) != (other.n, other.R, other.boundary):
            raise ValueError("Hamiltonians live on different chains")
        return SpinHamiltonian(self.n, self.R, self.boundary, self.one_body + other.one_body, self.strings + other.strings)


@dataclass(frozen=True, eq=False)
class DeterministicStrategy:
    """Outcome per (setting row, site); +-1 when d = 2, labels 0..d-1 otherwise."""

    values: np.ndarray
    d: int = 2

    def __post_init__(self):
        v = np.array(self.values, dtype=np.int64)
        if v.ndim != 2:
            raise ValueError("strategy must be a rows x n matrix")
        if self.d == 2:
            if not np.all(np.abs(v) == 1):
                raise ValueError("d = 2 strategies take values +1 / -1 in every cell")
        elif np.any((v < 0) | (v >= self.d)):
            raise ValueError(f"outcome labels must lie in 0..{self.d - 1}")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_local_states(cls, states: Sequence[int], rows: int, d: int = 2) -> "DeterministicStrategy":
        states = np.asarray(states, dtype=np.int64)
        labels = (states[None, :] // d ** np.arange(rows)[:, None]) % d
        return cls(1 - 2 * labels if d == 2 else labels, d)

    def labels(self) -> np.ndarray:
        return (1 - self.values) // 2 if self.d == 2 else self.values


def compile_hamiltonian(ineq: BellInequality, settings: MeasurementSettings) -> SpinHamiltonian:
    """Replace each correlator by its qubit observable and collect string weights."""
    sc = ineq.scenario
    if not ineq.structured or sc.d != 2:
        raise ValueError("only structured d = 2 inequalities compile to string Hamiltonians")
    settings.check(sc)
    n = sc.n
    one = np.zeros(n)
    st = np.zeros((n, sc.R, 2, 2))
    sites = range(n) if sc.ti else [None]
    ob = list(ineq.one_body) or [0.0]
    for i in range(n):
        one[i] = ob[0] if sc.ti else (ineq.one_body[i] if ineq.one_body else 0.0)
    for base in ineq.terms:
        for i in sites:
            t = base if i is None else base._replace(i=i)
            pk = settings.for_site(t.i)[t.k]
            pl = settings.for_site((t.i + t.r) % n)[t.l]
            cl = np.array([math.cos(pk), math.sin(pk)])
            cr = np.array([math.cos(pl), math.sin(pl)])
            st[t.i, t.r - 1] += t.gamma * np.outer(cl, cr)
    return SpinHamiltonian(n, sc.R, sc.boundary, one, st)


def evaluate_strategy(ineq: BellInequality, s: DeterministicStrategy):
    """Value of the Bell expression on a deterministic local strategy.

    Exact (a Python int) whenever every weight is an integer.
    """
    sc = ineq.scenario
    if s.values.shape != (sc.rows, sc.n) or s.d != sc.d:
        raise ValueError(f"strategy shape {s.values.shape} does not match {sc.rows} x {sc.n}")
    exact = ineq.integral
    vals = s.values.tolist()
    total = 0
    for f in ineq.factors():
        if f.a is None:
            prod = 1
            for j, k in enumerate(f.k):
                prod *= vals[k][(f.i + j) % sc.n]
        else:
            prod = int(all(vals[k][(f.i + j) % sc.n] == a for j, (k, a) in enumerate(zip(f.k, f.a))))
        total += (int(f.gamma) if exact else f.gamma) * prod
    return total


# -- JSON ----------------------------------------------------------------

def inequality_to_dict(ineq: BellInequality) -> dict:
    sc = ineq.scenario
    out = {
        "n": sc.n, "m": sc.m, "d": sc.d, "R": sc.R, "boundary": sc.boundary,
        "ti": sc.ti, "has_z": sc.has_z,
        "one_body": [_as_number(g) for g in ineq.one_body],
        "terms": [],
    }
    for t in ineq.terms:
        row = {"r": t.r, "k": t.k, "l": t.l, "gamma": _as_number(t.gamma)}
        if not sc.ti:
            row = {"i": t.i, **row}
        out["terms"].append(row)
    if ineq.general_terms:
        out["general_terms"] = []
        for t in ineq.general_terms:
            row = {"r": t.r, "k": list(t.k), "gamma": _as_number(t.gamma)}
            if t.a is not None:
                row["a"] = list(t.a)
            if not sc.ti:
                row = {"i": t.i, **row}
            out["general_terms"].append(row)
    return out


def inequality_from_dict(data: dict) -> BellInequality:
    known = {"n", "m", "d", "R", "boundary", "ti", "has_z", "one_body", "terms", "general_terms", "name", "comment"}
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown inequality keys: {sorted(extra)}")
    try:
        sc = BellScenario(
            n=int(data["n"]), m=int(data["m"]), d=int(data.get("d", 2)), R=int(data.get("R", 1)),
            boundary=str(data.get("boundary", PBC)).lower(), ti=bool(data.get("ti", False)),
            has_z=bool(data.get("has_z", True)),
        )
    except KeyError as exc:
        raise ValueError(f"inequality is missing key {exc}") from None
    terms = [Term(int(t.get("i", 0)), int(t["r"]), int(t["k"]), int(t["l"]), float(t["gamma"])) for t in data.get("terms", [])]
    gen = [
        GeneralTerm(int(t.get("i", 0)), int(t["r"]), tuple(int(k) for k in t["k"]), float(t["gamma"]),
                    None if t.get("a") is None else tuple(int(a) for a in t["a"]))
        for t in data.get("general_terms", [])
    ]
    return BellInequality(sc, tuple(data.get("one_body", ())), tuple(terms), tuple(gen))


def settings_to_dict(s: MeasurementSettings) -> dict:
    return {"shared": s.shared, "angles": [list(row) for row in s.angles]}


def settings_from_dict(data: dict) -> MeasurementSettings:
    extra = set(data) - {"shared", "angles", "comment"}
    if extra:
        raise ValueError(f"unknown settings keys: {sorted(extra)}")
    return MeasurementSettings(tuple(tuple(row) for row in data["angles"]), bool(data.get("shared", True)))


def load_inequality(path) -> BellInequality:
    with open(path, encoding="utf-8") as fh:
        return inequality_from_dict(json.load(fh))


def load_settings(path) -> MeasurementSettings:
    with open(path, encoding="utf-8") as fh:
        return settings_from_dict(json.load(fh))
