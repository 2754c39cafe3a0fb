"""Closed-form spectra of translation-invariant free-fermion chains.

A TI ring is fixed by the 2 x 2 blocks ``h_r[alpha, beta] = H[(0, alpha), (r, beta)]``
of its Majorana matrix, ``r = 0 .. R``.  A real Fourier transform splits
``H`` into 4 x 4 blocks, one per momentum pair ``k``; each contributes two
Williamson values

    eps_{k,+-} = (a_k + c_k +- sqrt((a_k - c_k)**2 + 4 (b_k**2 + x_k**2))) / 2

with ``x_k, a_k, b_k, c_k`` the cosine and sine sums of the blocks at
``upsilon_{k,r} = r pi (2k - (p + 1)/2) / n``.  The self-conjugate momenta
0 and pi give single values ``eps_{0,+-} = h_0[0,1] + sum_r (+-1)**r (h_r[0,1] - h_r[1,0])``.

Also here: the alternating-weight chained chain (two-site unit cell) and its
per-particle quantum value in the long-chain limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fermion import GroundEnergyReport, sector_energy
from .model import PBC, BellInequality, MeasurementSettings, SpinHamiltonian, compile_hamiltonian


@dataclass(frozen=True, eq=False)
class TiHamiltonianBlocks:
    """Forward Majorana blocks ``h[r]`` (``r = 0 .. R``) of a TI ring of ``n`` sites."""

    h: np.ndarray
    n: int

    def __post_init__(self):
        h = np.array(self.h, dtype=float)
        if h.ndim != 3 or h.shape[1:] != (2, 2):
            raise ValueError("blocks must have shape (R + 1, 2, 2)")
        if abs(h[0, 0, 1] + h[0, 1, 0]) > 1e-12 or h[0, 0, 0] or h[0, 1, 1]:
            raise ValueError("on-site block must be antisymmetric")
        h.setflags(write=False)
        object.__setattr__(self, "h", h)

    @property
    def R(self) -> int:
        return self.h.shape[0] - 1

    @classmethod
    def from_strings(cls, n: int, one_body: float, strings) -> "TiHamiltonianBlocks":
        """Blocks of ``t Z_i + sum_r t_r[a, b] Str^(i, r)_{a, b}`` at every site.

        ``h_0 = [[0, t], [-t, 0]]`` and ``h_r[1 - a, b] = (-1)**b t_r[a, b]``.
        """
        st = np.asarray(strings, dtype=float).reshape(-1, 2, 2)
        h = np.zeros((st.shape[0] + 1, 2, 2))
        h[0, 0, 1], h[0, 1, 0] = one_body, -one_body
        for a in range(2):
            for b in range(2):
                h[1:, 1 - a, b] = (-1) ** b * st[:, a, b]
        return cls(h, n)

    @classmethod
    def from_hamiltonian(cls, ham: SpinHamiltonian) -> "TiHamiltonianBlocks":
        if ham.boundary != PBC:
            raise ValueError("closed-form spectra need a ring")
        if not (np.allclose(ham.one_body, ham.one_body[0], rtol=0, atol=0)
                and np.all(ham.strings == ham.strings[0])):
            raise ValueError("Hamiltonian is not translation invariant")
        return cls.from_strings(ham.n, ham.one_body[0], ham.strings[0])

    @classmethod
    def from_inequality(cls, ineq: BellInequality, settings: MeasurementSettings) -> "TiHamiltonianBlocks":
        return cls.from_hamiltonian(compile_hamiltonian(ineq, settings))


@dataclass(frozen=True, eq=False)
class TiSpectrum:
    """Williamson values of one parity sector.

    ``eps_pairs`` has shape ``(K, 2)`` (the ``+`` and ``-`` branch per
    momentum pair); ``eps_zero`` holds the self-conjugate values present in
    this sector.
    """

    eps_pairs: np.ndarray
    eps_zero: np.ndarray
    p: int
    n: int
    has_zero_plus: bool
    has_zero_minus: bool

    @property
    def values(self) -> np.ndarray:
        return np.concatenate([self.eps_pairs.ravel(), self.eps_zero])

    @property
    def pair_count(self) -> int:
        return self.eps_pairs.shape[0]


def momentum_count(n: int, p: int) -> int:
    """Number of momentum pairs ``k = 1 .. floor((n + (p - 1)/2) / 2)``."""
    return (n + (p - 1) // 2) // 2


def zero_mode_flags(n: int, p: int) -> tuple[bool, bool]:
    """Which self-conjugate values (``eps_{0,+}``, ``eps_{0,-}``) the sector holds."""
    if p == -1:
        return True, n % 2 == 0
    return False, n % 2 == 1


def ti_spectrum(blocks: TiHamiltonianBlocks, p: int) -> TiSpectrum:
    """Closed-form Williamson values of a TI ring in parity sector ``p``."""
    if p not in (1, -1):
        raise ValueError(f"parity must be +1 or -1, got {p}")
    n, R, h = blocks.n, blocks.R, blocks.h
    if R >= n:
        raise ValueError(f"range {R} must be smaller than n={n}")
    K = momentum_count(n, p)
    k = np.arange(1, K + 1)[:, None]
    r = np.arange(1, R + 1)[None, :]
    ups = r * math.pi * (2 * k - (p + 1) / 2) / n
    c, s = np.cos(ups), np.sin(ups)
    hr = h[1:]
    x = h[0, 0, 1] + c @ (hr[:, 0, 1] - hr[:, 1, 0])
    a = -2 * s @ hr[:, 0, 0]
    b = -s @ (hr[:, 0, 1] + hr[:, 1, 0])
    cc = -2 * s @ hr[:, 1, 1]
    root = np.sqrt((a - cc) ** 2 + 4 * (b**2 + x**2))
    pairs = np.stack([(a + cc + root) / 2, (a + cc - root) / 2], axis=1)
    plus, minus = zero_mode_flags(n, p)
    diff = hr[:, 0, 1] - hr[:, 1, 0]
    q = np.arange(1, R + 1)
    zero = []
    if plus:
        zero.append(h[0, 0, 1] + diff.sum())
    if minus:
        zero.append(h[0, 0, 1] + ((-1.0) ** q * diff).sum())
    return TiSpectrum(pairs.reshape(K, 2), np.array(zero), p, n, plus, minus)


def ti_ground_energy(blocks: TiHamiltonianBlocks) -> GroundEnergyReport:
    """Sector energies from the closed-form spectra.

    The parity constraint reads ``p = (-1)**K prod_k s_k`` with ``K`` the
    number of momentum pairs; when it fails the weakest mode flips.
    """
    e, sg, cor, zm = {}, {}, {}, {}
    scale = max(1.0, float(np.abs(blocks.h).sum()))
    for p in (-1, 1):
        spec = ti_spectrum(blocks, p)
        sign = (-1) ** momentum_count(blocks.n, p)
        e[p], sg[p], cor[p], zm[p] = sector_energy(spec.values, sign, p, 1e-10 * scale)
    return GroundEnergyReport(e, sg, cor, zm)


# -- chained family (two-site unit cell) ------------------------------------

def chained_mode_values(m: int, pairs: int, eps: float, p: int) -> np.ndarray:
    """Williamson values of the alternating-weight ring, one per mode.

    The Majorana matrix factorizes into a site part (hopping amplitudes
    ``m (1 +- eps)``) times a fixed 2 x 2 flavour part with eigenvalues
    ``+-cos(pi / 2m)``.  The site part has values
    ``m sqrt(2 (1 + eps**2 + (eps**2 - 1) cos nu_k))`` with
    ``nu_k = pi (2k + (p + 1)/2) / pairs``; every one appears twice.
    """
    k = np.arange(pairs)
    nu = math.pi * (2 * k + (p + 1) / 2) / pairs
    site = m * np.sqrt(np.maximum(0.0, 2 * (1 + eps**2 + (eps**2 - 1) * np.cos(nu))))
    return np.repeat(site * math.cos(math.pi / (2 * m)), 2)


def chained_ground_energy(m: int, pairs: int, eps: float) -> GroundEnergyReport:
    """Sector energies of the chained ring's Bell operator at the optimal settings.

    The Pfaffian of a (site) x (flavour) product is positive here, so the
    constraint reduces to ``prod_k s_k = p``.  With all values non-negative
    that is ``(-1)**(2 pairs) = p``: the odd sector pays ``2 min eps``.
    """
    e, sg, cor, zm = {}, {}, {}, {}
    for p in (-1, 1):
        vals = chained_mode_values(m, pairs, eps, p)
        scale = max(1.0, 2 * m * (1 + abs(eps)))
        e[p], sg[p], cor[p], zm[p] = sector_energy(vals, 1, p, 1e-10 * scale)
    return GroundEnergyReport(e, sg, cor, zm)


def adaptive_simpson(f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50) -> float:
    """Adaptive Simpson quadrature with Richardson correction.

    Panels are refined depth-first, left before right, so the result is
    deterministic.
    """

    def simpson(fa, fm, fb, lo, hi):
        return (hi - lo) * (fa + 4 * fm + fb) / 6

    def rec(lo, hi, fa, fm, fb, whole, tol, depth):
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        left = simpson(fa, flm, fm, lo, mid)
        right = simpson(fm, frm, fb, mid, hi)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15 * tol:
            return left + right + delta / 15
        return rec(lo, mid, fa, flm, fm, left, tol / 2, depth - 1) + rec(
            mid, hi, fm, frm, fb, right, tol / 2, depth - 1
        )

    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    return rec(a, b, fa, fm, fb, simpson(fa, fm, fb, a, b), tol, max_depth)


def chained_beta_q_per_particle(m: int, eps: float, tol: float = 1e-10) -> float:
    """Long-chain quantum value per site of the chained ring.

    ``sqrt(2) m cos(pi / 2m) int_0^1 sqrt(1 + eps**2 + (eps**2 - 1) cos(2 pi x)) dx``.
    The integrand is symmetric about 1/2, so only ``[0, 1/2]`` is integrated.
    """
    if m < 2:
        raise ValueError("m must be at least 2")
    e2 = eps * eps

    def f(x):
        return math.sqrt(max(0.0, 1 + e2 + (e2 - 1) * math.cos(2 * math.pi * x)))

    integral = 2 * adaptive_simpson(f, 0.0, 0.5, tol / 4)
    return math.sqrt(2) * m * math.cos(math.pi / (2 * m)) * integral


def chained_classical_per_particle(m: int, eps: float) -> float:
    return 2 * (m - 1) * max(1.0, abs(eps))


def _bisect(g, lo, hi, tol):
    glo = g(lo)
    if glo * g(hi) > 0:
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def chained_violation_window(m: int, tol: float = 1e-6) -> tuple:
    """``(eps_low, eps_high)`` where the per-site quantum value beats the classical one.

    Roots are bracketed on (0, 1) and (1, 10); an empty tuple means no sign
    change was found.
    """
    g = lambda e: chained_beta_q_per_particle(m, e) - chained_classical_per_particle(m, e)
    lo = _bisect(g, 0.0, 1.0, tol)
    hi = _bisect(g, 1.0, 10.0, tol)
    if lo is None or hi is None:
        return ()
    return lo, hi
