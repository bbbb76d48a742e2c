"""Majorana generators on a Jordan-Wigner chain and the operators built from them.

Conventions used throughout the package:

* ``majoranas(n)[2k]`` and ``majoranas(n)[2k + 1]`` are the two generators of
  mode ``k`` (0-based), ``Z...Z X I...I`` and ``Z...Z Y I...I``.
* The parity operator is ``Z ⊗ ... ⊗ Z``.
* Traces are raw matrix traces. States are normalised with ``trace(rho) == 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache, reduce

import numpy as np

MAX_MODES = 6

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)


class CliffordError(ValueError):
    """Raised for malformed Clifford-algebra inputs."""


def _check_modes(n_modes: int) -> None:
    if not isinstance(n_modes, (int, np.integer)) or not 1 <= n_modes <= MAX_MODES:
        raise CliffordError(f"n_modes must be an integer in [1, {MAX_MODES}], got {n_modes!r}")


def _kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors)


@lru_cache(maxsize=None)
def _majoranas_cached(n_modes: int) -> tuple[np.ndarray, ...]:
    gens = []
    for k in range(n_modes):
        for pauli in (_X, _Y):
            factors = [_Z] * k + [pauli] + [_I2] * (n_modes - k - 1)
            m = _kron_all(factors)
            m.setflags(write=False)
            gens.append(m)
    return tuple(gens)


def majoranas(n_modes: int) -> tuple[np.ndarray, ...]:
    """Return the ``2 n_modes`` Majorana matrices (read-only, cached)."""
    _check_modes(n_modes)
    return _majoranas_cached(int(n_modes))


@lru_cache(maxsize=None)
def _parity_cached(n_modes: int) -> np.ndarray:
    p = _kron_all([_Z] * n_modes)
    p.setflags(write=False)
    return p


def parity_operator(n_modes: int) -> np.ndarray:
    _check_modes(n_modes)
    return _parity_cached(int(n_modes))


def annihilators(n_modes: int) -> tuple[np.ndarray, ...]:
    """Mode annihilators ``a_k = (R_{2k} + i R_{2k+1}) / 2``."""
    r = majoranas(n_modes)
    return tuple((r[2 * k] + 1j * r[2 * k + 1]) / 2 for k in range(n_modes))


def n_modes_of(a: np.ndarray) -> int:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise CliffordError(f"expected a square matrix, got shape {a.shape}")
    dim = a.shape[0]
    n = int(round(math.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise CliffordError(f"matrix dimension {dim} is not 2**n for n >= 1")
    _check_modes(n)
    return n


def car_defect(n_modes: int) -> float:
    """Largest entry of ``R_i R_j + R_j R_i - 2 delta_ij`` over all pairs."""
    r = majoranas(n_modes)
    eye = np.eye(2**n_modes)
    worst = 0.0
    for i, ri in enumerate(r):
        for j, rj in enumerate(r):
            anti = ri @ rj + rj @ ri - (2.0 * eye if i == j else 0.0)
            worst = max(worst, float(np.max(np.abs(anti))))
    return worst


def parity_automorphism(a: np.ndarray) -> np.ndarray:
    n = n_modes_of(a)
    p = parity_operator(n)
    return p @ a @ p


def even_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + parity_automorphism(a))


def odd_part(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a - parity_automorphism(a))


def is_even(a: np.ndarray, tol: float = 1e-12) -> bool:
    return float(np.max(np.abs(odd_part(a)), initial=0.0)) <= tol


def skew_derivation(j: int, a: np.ndarray) -> np.ndarray:
    """Graded derivation ``(R_j A - chi(A) R_j) / 2``."""
    r = majoranas(n_modes_of(a))[j]
    return 0.5 * (r @ a - parity_automorphism(a) @ r)


def skew_derivation_adjoint(j: int, a: np.ndarray) -> np.ndarray:
    """Adjoint of :func:`skew_derivation` for ``<A, B> = tr(A^* B)``."""
    r = majoranas(n_modes_of(a))[j]
    return 0.5 * (r @ a + parity_automorphism(a) @ r)


def number_operator(a: np.ndarray) -> np.ndarray:
    """Fermionic number operator ``(1/2) sum_j (A - R_j chi(A) R_j)``."""
    n = n_modes_of(a)
    chi_a = parity_automorphism(a)
    out = np.zeros_like(a, dtype=complex)
    for r in majoranas(n):
        out += a - r @ chi_a @ r
    return 0.5 * out


def liouvillean(a: np.ndarray) -> np.ndarray:
    """Generator ``2 sum_j (R_j A R_j - A)`` of the fermionic diffusion."""
    n = n_modes_of(a)
    out = np.zeros_like(a, dtype=complex)
    for r in majoranas(n):
        out += r @ a @ r
    return 2.0 * (out - 2 * n * a)


def liouvillean_superoperator(n_modes: int):
    """Sparse matrix of :func:`liouvillean` acting on row-major ``vec(A)``."""
    import scipy.sparse as sp

    r = majoranas(n_modes)
    dim = 2**n_modes
    total = sp.csr_matrix((dim * dim, dim * dim), dtype=complex)
    for rj in r:
        srj = sp.csr_matrix(rj)
        total = total + sp.kron(srj, srj.T, format="csr")
    return (2.0 * (total - 2 * n_modes * sp.identity(dim * dim, dtype=complex, format="csr"))).tocsr()


def bilinear_element(h: np.ndarray, n_modes: int | None = None) -> np.ndarray:
    """``sum_ij H_ij R_j R_i`` for a ``2n x 2n`` coefficient matrix ``H``."""
    h = np.asarray(h)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
        raise CliffordError(f"coefficient matrix must be square of even size, got {h.shape}")
    n = h.shape[0] // 2 if n_modes is None else n_modes
    if h.shape[0] != 2 * n:
        raise CliffordError("coefficient matrix size does not match n_modes")
    r = majoranas(n)
    out = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(2 * n):
        for j in range(2 * n):
            if h[i, j] != 0:
                out += h[i, j] * (r[j] @ r[i])
    return out


def majorana_monomial(indices, n_modes: int) -> np.ndarray:
    """Ordered product ``R_{i1} R_{i2} ...`` (identity for an empty tuple)."""
    r = majoranas(n_modes)
    out = np.eye(2**n_modes, dtype=complex)
    for i in indices:
        out = out @ r[i]
    return out


def reduce_monomial(indices) -> tuple[int, tuple[int, ...]]:
    """Bring ``R_{i1} ... R_{ik}`` to strictly increasing order using the CAR.

    Returns ``(sign, reduced)`` with ``R_{i1}...R_{ik} = sign * R_{reduced}``.
    """
    seq = list(indices)
    sign = 1
    # bubble sort; adjacent swaps of distinct generators cost a sign
    changed = True
    while changed:
        changed = False
        i = 0
        while i < len(seq) - 1:
            if seq[i] > seq[i + 1]:
                seq[i], seq[i + 1] = seq[i + 1], seq[i]
                sign = -sign
                changed = True
            elif seq[i] == seq[i + 1]:
                del seq[i : i + 2]
                changed = True
                continue
            i += 1
    return sign, tuple(seq)


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def _is_hermitian(a: np.ndarray, tol: float = 1e-12) -> bool:
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
    return float(np.max(np.abs(a - a.conj().T), initial=0.0)) <= tol * scale


def operator_exp(a: np.ndarray, *, hermitian: bool | None = None) -> np.ndarray:
    """Matrix exponential.

    Hermitian input goes through an eigendecomposition. Anything else uses
    scaling and squaring around a Taylor series truncated once a term drops
    below ``1e-16`` relative to the running sum.
    """
    a = np.asarray(a, dtype=complex)
    if hermitian is None:
        hermitian = _is_hermitian(a)
    if hermitian:
        w, v = np.linalg.eigh(0.5 * (a + a.conj().T))
        return (v * np.exp(w)) @ v.conj().T
    norm = float(np.linalg.norm(a, 1))
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 0.5 else 0
    scaled = a / (2**squarings)
    term = np.eye(a.shape[0], dtype=complex)
    total = term.copy()
    for k in range(1, 60):
        term = term @ scaled / k
        total = total + term
        if np.max(np.abs(term)) <= 1e-16 * max(1.0, float(np.max(np.abs(total)))):
            break
    for _ in range(squarings):
        total = total @ total
    return total


def operator_log(rho: np.ndarray, clip: float = 1e-12) -> tuple[np.ndarray, bool]:
    """Logarithm of a positive matrix; eigenvalues below ``clip`` are raised to it.

    Returns ``(log, clipped)``.
    """
    w, v = np.linalg.eigh(0.5 * (rho + rho.conj().T))
    clipped = bool(np.any(w < clip))
    w = np.maximum(w, clip)
    return (v * np.log(w)) @ v.conj().T, clipped


@dataclass(frozen=True)
class CliffordAlgebra:
    """Convenience bundle for one register of ``n_modes`` modes."""

    n_modes: int

    def __post_init__(self) -> None:
        _check_modes(self.n_modes)

    @property
    def dim(self) -> int:
        return 2**self.n_modes

    @property
    def generators(self) -> tuple[np.ndarray, ...]:
        return majoranas(self.n_modes)

    @property
    def parity(self) -> np.ndarray:
        return parity_operator(self.n_modes)

    def identity(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def maximally_mixed(self) -> np.ndarray:
        return self.identity() / self.dim
