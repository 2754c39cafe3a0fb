"""Free-fermion ground energies of string Hamiltonians.

Jordan-Wigner maps site ``i`` to the Majorana pair ``c_{i,0}, c_{i,1}``
(row ``2i + alpha`` of the Majorana matrix) with
``Z_i = i c_{i,0} c_{i,1}``.  A string ``Str^(i,r)_{a,b}`` becomes
``i (-1)**b c_{i,1-a} c_{i+r,b}``; strings that wrap past site ``n - 1``
pick up the factor ``-p`` where ``p`` is the eigenvalue of the parity
``prod_i Z_i``.  The spin Hamiltonian then equals ``(i/2) c^T H c`` on the
sector with parity ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .classical_dp import classical_bound
from .model import OBC, BellInequality, MeasurementSettings, SpinHamiltonian, compile_hamiltonian

PARITIES = (1, -1)


@dataclass(frozen=True, eq=False)
class MajoranaMatrix:
    """Real antisymmetric ``2n x 2n`` matrix with the parity used to build it."""

    H: np.ndarray
    parity: int = -1

    @property
    def n(self) -> int:
        return self.H.shape[0] // 2


@dataclass(frozen=True, eq=False)
class WilliamsonForm:
    """``O^T H O = J(eps)`` with ``J`` a direct sum of ``[[0, e], [-e, 0]]``."""

    O: np.ndarray
    eps: np.ndarray
    detO: int

    def J(self) -> np.ndarray:
        return canonical_form(self.eps)


@dataclass(frozen=True)
class GroundEnergyReport:
    """Lowest energy in each parity sector and the overall ground energy.

    ``e0_per_parity[p]`` is the sector minimum; ``signs[p]`` the mode
    occupations ``s_k`` reaching it; ``corrected[p]`` tells whether the
    parity constraint forced the weakest mode to flip.
    """

    e0_per_parity: dict
    signs: dict = field(default_factory=dict)
    corrected: dict = field(default_factory=dict)
    zero_mode: dict = field(default_factory=dict)

    @property
    def e0(self) -> float:
        return min(self.e0_per_parity.values())


def canonical_form(eps) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    J = np.zeros((2 * len(eps), 2 * len(eps)))
    k = np.arange(len(eps))
    J[2 * k, 2 * k + 1] = eps
    J[2 * k + 1, 2 * k] = -eps
    return J


def assemble_majorana(h: SpinHamiltonian, p: int = -1) -> MajoranaMatrix:
    """Jordan-Wigner image of ``h`` in the parity-``p`` sector.

    Raises
    ------
    ValueError
        If ``p`` is not +-1 or a nonzero string would wrap onto its own site.
    """
    if p not in PARITIES:
        raise ValueError(f"parity must be +1 or -1, got {p}")
    n = h.n
    U = np.zeros((2 * n, 2 * n))
    i = np.arange(n)
    U[2 * i, 2 * i + 1] += h.one_body
    for r in range(1, h.R + 1):
        block = h.strings[:, r - 1]
        if r >= n:
            if np.any(block):
                raise ValueError(f"string range {r} reaches around a ring of {n} sites")
            continue
        j = (i + r) % n
        wrap = np.where(i + r >= n, -p, 1)
        for a in range(2):
            for b in range(2):
                v = block[:, a, b] * (-1) ** b * wrap
                np.add.at(U, (2 * i + 1 - a, 2 * j + b), v)
    return MajoranaMatrix(U - U.T, p)


def _clusters(w, tol):
    """Split sorted values into runs whose neighbours differ by at most ``tol``.

    Runs of odd length are merged with the next run, since eigenvalues of
    ``H^T H`` come in pairs.
    """
    groups = []
    start = 0
    for k in range(1, len(w) + 1):
        if k == len(w) or w[k] - w[k - 1] > tol:
            if (k - start) % 2 == 0 or k == len(w):
                groups.append((start, k))
                start = k
    return groups


def _pair_subspace(K, zero_tol):
    """Canonical pairs inside degenerate clusters of equal size.

    ``K`` has shape ``(C, k, k)``: the Majorana matrix restricted to ``C``
    clusters.  Picks a unit vector ``e``, pairs it with ``-K e / |K e|``,
    removes both and repeats.  Returns pairing matrices ``(C, k, k)`` in
    cluster coordinates and values ``(C, k // 2)``.
    """
    C, k, _ = K.shape
    if k % 2:
        raise np.linalg.LinAlgError("odd-dimensional invariant subspace")
    basis = np.broadcast_to(np.eye(k), (C, k, k)).copy()
    P = np.empty((C, k, k))
    eps = np.empty((C, k // 2))
    for step in range(k // 2):
        e = basis[:, :, 0]
        Ke = np.einsum("cij,cj->ci", K, e)
        f = np.einsum("cij,ckj,ck->ci", basis, basis, Ke)  # drop leak out of the cluster
        nf = np.linalg.norm(f, axis=1)
        small = nf <= zero_tol
        o2 = np.where(small[:, None], basis[:, :, 1], -f / np.where(small, 1.0, nf)[:, None])
        P[:, :, 2 * step] = e
        P[:, :, 2 * step + 1] = o2
        eps[:, step] = np.einsum("ci,cij,cj->c", e, K, o2)
        j = basis.shape[2] - 2
        if j == 0:
            break
        rest = basis - e[:, :, None] * np.einsum("ci,cij->cj", e, basis)[:, None, :]
        rest -= o2[:, :, None] * np.einsum("ci,cij->cj", o2, basis)[:, None, :]
        u = np.linalg.svd(rest, full_matrices=False)[0]
        basis = u[:, :, :j]
    return P, eps


def williamson(Hm: MajoranaMatrix) -> WilliamsonForm:
    """Orthogonal ``O`` and values ``eps`` with ``O^T H O = J(eps)``.

    Eigenvectors of the positive semidefinite ``H^T H`` span the paired
    planes.  Planes of distinct ``eps**2`` come out directly; degenerate
    clusters (``|eps_i**2 - eps_j**2| <= 1e-8 max(1, |H|**2)``) are re-paired
    one vector at a time.  Values are read off as ``o1^T H o2`` rather than
    square roots, which keeps zero modes accurate.

    Raises
    ------
    ValueError
        If ``H`` is not antisymmetric.
    np.linalg.LinAlgError
        If ``|det O|`` drifts from 1 by more than 1e-6.
    """
    H = np.asarray(Hm.H, dtype=float)
    scale = max(1.0, float(np.abs(H).max(initial=0.0)))
    if np.abs(H + H.T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("Majorana matrix is not antisymmetric")
    N = H.shape[0]
    if N == 0:
        return WilliamsonForm(np.zeros((0, 0)), np.zeros(0), 1)
    w, V = np.linalg.eigh(H.T @ H)
    hnorm = float(np.sqrt(max(w[-1], 0.0)))  # spectral norm of H
    groups = _clusters(w, 1e-8 * max(1.0, hnorm**2))
    zero_tol = 1e-10 * max(hnorm, 1e-300)
    O = np.empty_like(V)
    eps = np.empty(N // 2)
    pairs = [g for g in groups if g[1] - g[0] == 2]
    if pairs:
        idx = np.array([g[0] for g in pairs])
        V0, V1 = V[:, idx], V[:, idx + 1]
        c1 = (V1 * (H @ V0)).sum(axis=0)
        sgn = np.where(c1 < 0, -1.0, 1.0)
        O[:, idx] = V0
        O[:, idx + 1] = -sgn * V1
        eps[idx // 2] = np.abs(c1)
    by_size = {}
    for lo, hi in groups:
        if hi - lo > 2:
            by_size.setdefault(hi - lo, []).append(lo)
    for k, starts in by_size.items():
        cols = np.array(starts)[:, None] + np.arange(k)[None, :]
        Vc = V[:, cols].transpose(1, 0, 2)  # (C, N, k)
        K = Vc.transpose(0, 2, 1) @ H @ Vc
        P, ev = _pair_subspace(0.5 * (K - K.transpose(0, 2, 1)), zero_tol)
        O[:, cols] = (Vc @ P).transpose(1, 0, 2)
        eps[cols[:, ::2] // 2] = ev
    sign, logdet = np.linalg.slogdet(O)
    if abs(np.exp(logdet) - 1.0) > 1e-6:
        raise np.linalg.LinAlgError(f"|det O| = {np.exp(logdet)} is not 1")
    return WilliamsonForm(O, eps, int(round(sign)))


def sector_energy(eps, detO: int, p: int, zero_tol: float):
    """Lowest ``sum_k s_k eps_k`` compatible with parity ``p``.

    Returns ``(energy, signs, corrected, zero_mode)``.  The constraint is
    ``detO * prod_k s_k = p``; if it fails, the mode with the smallest
    ``|eps_k|`` is flipped.  A zero mode makes the constraint free.
    """
    eps = np.asarray(eps, dtype=float)
    s = np.where(eps > 0, -1, 1)
    energy = float(-np.abs(eps).sum())
    if eps.size == 0:
        return energy, s, False, False
    mags = np.abs(eps)
    zero = bool(mags.min() <= zero_tol)
    corrected = False
    if not zero and detO * int(np.prod(s)) != p:
        k = int(np.argmin(mags))
        s[k] = -s[k]
        energy += 2 * float(mags[k])
        corrected = True
    return energy, s, corrected, zero


def _wraps(h: SpinHamiltonian) -> bool:
    return h.boundary != OBC and h.crosses_origin


def ground_energy(h: SpinHamiltonian) -> GroundEnergyReport:
    """Ground energy of ``h`` by parity sector.

    Without wrapping strings both sectors share one Majorana matrix, so a
    single decomposition serves both.
    """
    e, sg, cor, zm = {}, {}, {}, {}
    form = None
    for p in (-1, 1):
        if form is None or _wraps(h):
            form = williamson(assemble_majorana(h, p))
            zero_tol = 1e-10 * max(float(np.abs(form.eps).max(initial=0.0)), 1e-300)
        e[p], sg[p], cor[p], zm[p] = sector_energy(form.eps, form.detO, p, zero_tol)
    return GroundEnergyReport(e, sg, cor, zm)


def violation(ineq: BellInequality, settings: MeasurementSettings, beta_c=None) -> float:
    """``beta_C + E_0`` of the compiled Bell operator; negative means nonlocal."""
    if beta_c is None:
        beta_c = classical_bound(ineq, witness=False).beta_c
    return float(beta_c) + ground_energy(compile_hamiltonian(ineq, settings)).e0
