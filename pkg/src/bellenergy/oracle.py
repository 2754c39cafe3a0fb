"""Brute-force reference implementations for small systems.

Nothing here reuses the fast solvers: Bell operators are assembled by
Kronecker products of the substituted observables, ground energies come
from direct diagonalization, and classical bounds from enumerating every
deterministic strategy.  Site 0 is the most significant qubit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .classical_dp import BoundResult, common_denominator
from .model import OBC, BellInequality, DeterministicStrategy, MeasurementSettings, SpinHamiltonian

MAX_QUBITS = 14
MAX_STRATEGIES = 2**24
DENSE_LIMIT = 10

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)
PAULI = (X, Y, Z)


@dataclass(frozen=True, eq=False)
class DenseOperator:
    """Hermitian operator on ``n`` qubits, stored sparse (CSR) or dense."""

    matrix: object
    n: int

    def __post_init__(self):
        if self.n > MAX_QUBITS:
            raise ValueError(f"dense oracle is capped at {MAX_QUBITS} qubits, got {self.n}")
        if self.matrix.shape != (2**self.n, 2**self.n):
            raise ValueError("operator dimension does not match qubit count")
        diff = self.matrix - self.matrix.conj().T
        res = abs(diff).max() if sp.issparse(diff) else np.abs(diff).max(initial=0.0)
        if res > 1e-12 * max(1.0, _norm(self.matrix)):
            raise ValueError(f"operator is not Hermitian (residual {res:.3g})")

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray() if sp.issparse(self.matrix) else np.asarray(self.matrix)

    def expectation(self, psi) -> float:
        psi = np.asarray(psi)
        return float(np.real(np.vdot(psi, self.matrix @ psi)))


def _norm(m):
    return abs(m).max() if sp.issparse(m) else np.abs(m).max(initial=0.0)


def product_operator(n: int, local: dict):
    """Sparse ``kron`` of 2 x 2 matrices with identities on the other sites."""
    if not local:
        return sp.identity(2**n, dtype=complex, format="csr")
    ops = []
    run = 0
    for i in range(n):
        if i in local:
            if run:
                ops.append(sp.identity(2**run, dtype=complex, format="csr"))
                run = 0
            ops.append(sp.csr_matrix(local[i]))
        else:
            run += 1
    if run:
        ops.append(sp.identity(2**run, dtype=complex, format="csr"))
    return reduce(lambda a, b: sp.kron(a, b, format="csr"), ops)


def planar(phi: float) -> np.ndarray:
    return np.cos(phi) * X + np.sin(phi) * Y


def settings_observables(ineq: BellInequality, settings: MeasurementSettings) -> list:
    """Per-site observable lists: planar settings, then Z for the z row."""
    sc = ineq.scenario
    settings.check(sc)
    out = []
    for i in range(sc.n):
        obs = [planar(phi) for phi in settings.for_site(i)]
        if sc.has_z:
            obs.append(Z)
        out.append(obs)
    return out


def dense_correlator_operator(ineq: BellInequality, observables) -> DenseOperator:
    """``sum gamma prod_j O[site_j][k_j]`` with explicit per-site observables.

    ``observables[i][k]`` is the 2 x 2 Hermitian matrix of setting ``k`` at
    site ``i``; every row must square to the identity for the result to be a
    Bell operator, but that is not enforced.
    """
    sc = ineq.scenario
    if sc.d != 2:
        raise ValueError("dense oracle handles dichotomic settings only")
    n = sc.n
    if n > MAX_QUBITS:
        raise ValueError(f"dense oracle is capped at {MAX_QUBITS} qubits, got {n}")
    total = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for f in ineq.factors():
        if f.a is not None:
            raise ValueError("probability-form terms have no dense correlator image")
        local = {}
        for j, k in enumerate(f.k):
            site = (f.i + j) % n
            m = observables[site][k]
            local[site] = local[site] @ m if site in local else m
        total = total + f.gamma * product_operator(n, local)
    return DenseOperator(total.tocsr(), n)


def dense_bell_operator(ineq: BellInequality, settings: MeasurementSettings) -> DenseOperator:
    """Bell operator (without the classical-bound shift) for planar settings."""
    return dense_correlator_operator(ineq, settings_observables(ineq, settings))


def dense_hamiltonian(h: SpinHamiltonian) -> DenseOperator:
    """Kronecker assembly of a string Hamiltonian."""
    n = h.n
    if n > MAX_QUBITS:
        raise ValueError(f"dense oracle is capped at {MAX_QUBITS} qubits, got {n}")
    total = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for i in range(n):
        if h.one_body[i]:
            total = total + h.one_body[i] * product_operator(n, {i: Z})
        for r in range(1, h.R + 1):
            if h.boundary == OBC and i + r >= n:
                continue
            for a in range(2):
                for b in range(2):
                    c = h.strings[i, r - 1, a, b]
                    if not c:
                        continue
                    local = {(i + j) % n: Z for j in range(1, r)}
                    local[i] = PAULI[a]
                    local[(i + r) % n] = PAULI[b]
                    total = total + c * product_operator(n, local)
    return DenseOperator(total.tocsr(), n)


def dense_pauli_chain(couplings, boundary: str = "pbc") -> DenseOperator:
    """``sum_i sum_{a,b} c[i, a, b] sigma_a^(i) sigma_b^(i+1)`` with a, b in (X, Y, Z)."""
    c = np.asarray(couplings, dtype=float)
    n = c.shape[0]
    total = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for i in range(n):
        if boundary == OBC and i + 1 >= n:
            continue
        for a in range(3):
            for b in range(3):
                if c[i, a, b]:
                    total = total + c[i, a, b] * product_operator(n, {i: PAULI[a], (i + 1) % n: PAULI[b]})
    return DenseOperator(total.tocsr(), n)


def parity_diagonal(n: int) -> np.ndarray:
    """Eigenvalue of ``prod_i Z_i`` on each computational basis state."""
    s = np.arange(2**n)
    bits = np.zeros(2**n, dtype=np.int64)
    for q in range(n):
        bits += (s >> q) & 1
    return 1 - 2 * (bits % 2)


def _lowest(mat, n):
    dim = mat.shape[0]
    if dim == 0:
        return np.inf
    if n <= DENSE_LIMIT or dim <= 2**DENSE_LIMIT:
        m = mat.toarray() if sp.issparse(mat) else mat
        return float(np.linalg.eigvalsh(m)[0])
    # fixed pseudo-random start: all-ones can be orthogonal to the ground state by symmetry
    v0 = np.random.default_rng(12345).normal(size=dim).astype(mat.dtype)
    v0 /= np.linalg.norm(v0)
    try:
        w, v = spla.eigsh(mat, k=1, which="SA", v0=v0, tol=1e-12, maxiter=20 * dim)
    except spla.ArpackNoConvergence as exc:
        if len(exc.eigenvalues):
            vec = exc.eigenvectors[:, 0]
            res = np.linalg.norm(mat @ vec - exc.eigenvalues[0] * vec)
            raise RuntimeError(f"Lanczos did not converge (residual {res:.3g})") from None
        raise RuntimeError("Lanczos did not converge") from None
    res = np.linalg.norm(mat @ v[:, 0] - w[0] * v[:, 0])
    if res > 1e-7 * max(1.0, abs(w[0])):
        raise RuntimeError(f"Lanczos residual {res:.3g} too large")
    return float(w[0])


def dense_ground_energy(op: DenseOperator) -> float:
    """Lowest eigenvalue: full solve up to 10 qubits, Lanczos beyond."""
    return _lowest(op.matrix, op.n)


def dense_sector_energies(op: DenseOperator) -> dict:
    """Lowest eigenvalue inside each ``prod Z = p`` sector."""
    par = parity_diagonal(op.n)
    out = {}
    m = op.matrix.tocsr() if sp.issparse(op.matrix) else sp.csr_matrix(op.matrix)
    for p in (1, -1):
        idx = np.flatnonzero(par == p)
        out[p] = _lowest(m[idx][:, idx], op.n)
    return out


# -- exhaustive classical bound ---------------------------------------------

def exhaustive_classical_bound(ineq: BellInequality, chunk: int = 1 << 16) -> BoundResult:
    """Minimum over every deterministic strategy by direct enumeration.

    Strategies are enumerated with site 0 most significant, so the first
    optimum found is the lexicographically smallest.
    """
    sc = ineq.scenario
    S = sc.d**sc.rows
    total = S**sc.n
    if total > MAX_STRATEGIES:
        raise ValueError(f"{total} strategies exceed the enumeration cap {MAX_STRATEGIES}")
    L = common_denominator(ineq.gammas)
    exact = L is not None
    factors = [(f.i, f.k, f.a, round(f.gamma * L) if exact else f.gamma) for f in ineq.factors()]
    dtype = np.int64 if exact else float
    best_val, best_idx = None, None
    place = S ** np.arange(sc.n - 1, -1, -1, dtype=np.int64)
    digit = sc.d ** np.arange(sc.rows, dtype=np.int64)
    for lo in range(0, total, chunk):
        idx = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        states = (idx[:, None] // place[None, :]) % S  # (batch, site)
        lab = (states[:, :, None] // digit[None, None, :]) % sc.d  # (batch, site, row)
        val = np.zeros(len(idx), dtype=dtype)
        for i, ks, a, g in factors:
            term = np.full(len(idx), g, dtype=dtype)
            for j, k in enumerate(ks):
                x = lab[:, (i + j) % sc.n, k]
                term = term * ((1 - 2 * x) if a is None else (x == a[j]))
            val += term
        j = int(np.argmin(val))
        if best_val is None or val[j] < best_val:
            best_val, best_idx = val[j], int(idx[j])
    states = [(best_idx // int(p)) % S for p in place]
    w = DeterministicStrategy.from_local_states(states, sc.rows, sc.d)
    if not exact:
        value = float(best_val)
    elif L == 1:
        value = int(best_val)
    else:
        value = float(Fraction(int(best_val), L))
    return BoundResult(value, w, exact)


# -- parity under orthogonal mode changes -----------------------------------

def jordan_wigner_majoranas(n: int) -> list:
    """Dense Majoranas with ``Z_i = i c_{2i} c_{2i+1}``."""
    out = []
    for i in range(n):
        string = {j: Z for j in range(i)}
        out.append(product_operator(n, {**string, i: X}).toarray())
        out.append(product_operator(n, {**string, i: -Y}).toarray())
    return out


def random_reflections(dim: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    O = np.eye(dim)
    for _ in range(count):
        v = rng.normal(size=dim)
        v /= np.linalg.norm(v)
        O = O @ (np.eye(dim) - 2 * np.outer(v, v))
    return O


def _pair_product(c):
    n = len(c) // 2
    out = np.eye(c[0].shape[0], dtype=complex)
    for k in range(n):
        out = out @ (1j * c[2 * k] @ c[2 * k + 1])
    return out


def dense_parity_transform_check(n: int, reflection_count: int, seed: int = 0):
    """Compare ``prod_k i d_{2k} d_{2k+1}`` with ``det(O) prod_k i c_{2k} c_{2k+1}``.

    ``d_a = sum_b O[b, a] c_b`` for ``O`` a product of random reflections.

    Returns
    -------
    residual : float
        Max-norm difference of the two dense operators.
    det_o : int
        Determinant of ``O`` (+-1).
    """
    if n > 4:
        raise ValueError("parity check is limited to n <= 4")
    c = jordan_wigner_majoranas(n)
    O = random_reflections(2 * n, reflection_count, seed)
    d = [sum(O[b, a] * c[b] for b in range(2 * n)) for a in range(2 * n)]
    det_o = int(round(np.linalg.det(O)))
    residual = float(np.abs(_pair_product(d) - det_o * _pair_product(c)).max())
    return residual, det_o
