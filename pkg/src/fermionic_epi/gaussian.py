"""Pfaffians, covariance matrices and quasi-free (Gaussian) even states."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .clifford import (
    CliffordError,
    annihilators,
    bilinear_element,
    majoranas,
    n_modes_of,
    operator_exp,
    reduce_monomial,
)


class GaussianError(ValueError):
    """Raised when a matrix is not an admissible covariance or Hamiltonian."""


def _check_skew(m: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise GaussianError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    if float(np.max(np.abs(m + m.T), initial=0.0)) > tol * scale:
        raise GaussianError("matrix is not antisymmetric")
    return m


def _permutation_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def pfaffian_oracle(m: np.ndarray) -> complex:
    """Pfaffian from the defining sum over all permutations (size <= 8)."""
    m = _check_skew(m)
    size = m.shape[0]
    if size % 2:
        return 0.0
    if size > 8:
        raise GaussianError("the permutation-sum oracle is limited to size 8")
    n = size // 2
    total = 0.0
    for perm in itertools.permutations(range(size)):
        term = _permutation_sign(perm)
        for j in range(n):
            term = term * m[perm[2 * j], perm[2 * j + 1]]
        total += term
    return total / (2**n * math.factorial(n))


def pfaffian(m: np.ndarray) -> complex:
    """Pfaffian by skew-symmetric Gaussian elimination with partial pivoting.

    Congruence transformations ``A -> L A L^T`` with unit-triangular ``L``
    keep the Pfaffian; each row/column swap flips its sign.
    """
    m = _check_skew(m)
    size = m.shape[0]
    if size % 2:
        return 0.0
    dtype = complex if np.iscomplexobj(m) else float
    a = np.array(m, dtype=dtype)
    value = 1.0
    for k in range(0, size - 1, 2):
        pivot = k + 1 + int(np.argmax(np.abs(a[k + 1 :, k])))
        if pivot != k + 1:
            a[[k + 1, pivot], :] = a[[pivot, k + 1], :]
            a[:, [k + 1, pivot]] = a[:, [pivot, k + 1]]
            value = -value
        if a[k + 1, k] == 0:
            return 0.0 * value
        value *= a[k, k + 1]
        if k + 2 < size:
            tau = a[k, k + 2 :] / a[k, k + 1]
            col = a[k + 2 :, k + 1].copy()
            a[k + 2 :, k + 2 :] += np.outer(tau, col) - np.outer(col, tau)
    return value


def covariance_of(rho: np.ndarray) -> np.ndarray:
    """Real antisymmetric ``Gamma_ij = (i/2) Tr(rho [R_i, R_j])``."""
    n = n_modes_of(rho)
    r = majoranas(n)
    size = 2 * n
    gamma = np.zeros((size, size))
    for i in range(size):
        for j in range(i + 1, size):
            val = 0.5j * np.trace(rho @ (r[i] @ r[j] - r[j] @ r[i]))
            gamma[i, j] = val.real
            gamma[j, i] = -val.real
    return gamma


@dataclass(frozen=True)
class NormalForm:
    """``Gamma = O^T (direct sum of lambda_k [[0, 1], [-1, 0]]) O`` with ``lambda_k >= 0``."""

    rotation: np.ndarray
    lambdas: np.ndarray

    def block_matrix(self) -> np.ndarray:
        n = len(self.lambdas)
        out = np.zeros((2 * n, 2 * n))
        for k, lam in enumerate(self.lambdas):
            out[2 * k, 2 * k + 1] = lam
            out[2 * k + 1, 2 * k] = -lam
        return out


def normal_form(gamma: np.ndarray, tol: float = 1e-12) -> NormalForm:
    """Block-diagonalise a real antisymmetric matrix with a real Schur decomposition."""
    gamma = np.asarray(_check_skew(gamma), dtype=float)
    size = gamma.shape[0]
    if size % 2:
        raise GaussianError("covariance must have even size")
    t, z = scipy.linalg.schur(gamma, output="real")
    blocks: list[tuple[int, int]] = []
    singles: list[int] = []
    i = 0
    while i < size:
        if i + 1 < size and abs(t[i + 1, i]) > tol:
            blocks.append((i, i + 1))
            i += 2
        else:
            singles.append(i)
            i += 1
    # zero eigenvalues come as an even number of 1x1 blocks; pair them up
    blocks.extend(zip(singles[0::2], singles[1::2]))
    rows = []
    lambdas = []
    zt = z.T
    for p, q in blocks:
        u, v = zt[p], zt[q]
        lam = float(u @ gamma @ v)
        if lam < 0:
            u, v = v, u
            lam = -lam
        rows.extend([u, v])
        lambdas.append(lam)
    return NormalForm(np.array(rows), np.array(lambdas))


def _symplectic_check(gamma: np.ndarray, tol: float) -> None:
    norm = float(np.linalg.norm(gamma, 2)) if gamma.size else 0.0
    if norm > 1.0 + tol:
        raise GaussianError(f"covariance has operator norm {norm:.6g} > 1")


@dataclass(frozen=True)
class GaussianState:
    """Even quasi-free state specified by its covariance matrix."""

    covariance: np.ndarray
    tol: float = field(default=1e-10, repr=False)

    def __post_init__(self) -> None:
        gamma = np.array(_check_skew(self.covariance, self.tol), dtype=float)
        if gamma.shape[0] % 2 or gamma.shape[0] == 0:
            raise GaussianError("covariance must have positive even size")
        _symplectic_check(gamma, self.tol)
        gamma.setflags(write=False)
        object.__setattr__(self, "covariance", gamma)

    @property
    def n_modes(self) -> int:
        return self.covariance.shape[0] // 2

    @cached_property
    def normal_form(self) -> NormalForm:
        return normal_form(self.covariance)

    @property
    def is_pure(self) -> bool:
        return bool(np.all(np.abs(np.abs(self.normal_form.lambdas) - 1.0) <= 1e-10))

    @cached_property
    def density(self) -> np.ndarray:
        return gaussian_state_from_covariance(self.covariance, tol=self.tol)

    def two_point(self) -> np.ndarray:
        """Matrix of ``Tr(rho R_i R_j) = delta_ij - i Gamma_ij``."""
        return np.eye(2 * self.n_modes) - 1j * self.covariance

    def eigenvalues(self) -> np.ndarray:
        """Spectrum of the density matrix, ``prod_k (1 +- lambda_k) / 2``."""
        lams = self.normal_form.lambdas
        out = np.ones(1)
        for lam in lams:
            out = np.concatenate([out * (1 + lam) / 2, out * (1 - lam) / 2])
        return np.sort(out)


def gaussian_state_from_covariance(gamma: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Density matrix ``prod_k (1 + i lambda_k R'_{2k} R'_{2k+1}) / 2^n`` with rotated generators."""
    gamma = np.asarray(_check_skew(gamma, tol), dtype=float)
    _symplectic_check(gamma, tol)
    n = gamma.shape[0] // 2
    nf = normal_form(gamma)
    r = majoranas(n)
    rotated = [sum(nf.rotation[a, b] * r[b] for b in range(2 * n)) for a in range(2 * n)]
    dim = 2**n
    rho = np.eye(dim, dtype=complex) / dim
    for k, lam in enumerate(nf.lambdas):
        rho = rho @ (np.eye(dim) + 1j * lam * rotated[2 * k] @ rotated[2 * k + 1])
    return 0.5 * (rho + rho.conj().T)


def wick_moment(state: GaussianState | np.ndarray, indices) -> complex:
    """``Tr(rho R_{i1} ... R_{ik})`` from the pair contractions.

    Repeated generators are first cancelled with ``R_j^2 = 1``; odd moments vanish.
    """
    gamma = state.covariance if isinstance(state, GaussianState) else np.asarray(state)
    sign, reduced = reduce_monomial(indices)
    if len(reduced) % 2:
        return 0.0
    if not reduced:
        return float(sign)
    idx = np.array(reduced)
    pair = -1j * gamma[np.ix_(idx, idx)]
    return sign * pfaffian(pair)


def direct_moment(rho: np.ndarray, indices) -> complex:
    """``Tr(rho R_{i1} ... R_{ik})`` by explicit matrix products."""
    r = majoranas(n_modes_of(rho))
    prod = np.eye(rho.shape[0], dtype=complex)
    for i in indices:
        prod = prod @ r[i]
    return complex(np.trace(rho @ prod))


def check_self_dual_hamiltonian(h: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """In the Majorana frame a self-dual one-particle operator is Hermitian and antisymmetric."""
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] % 2:
        raise GaussianError("Hamiltonian must be square of even size")
    if np.max(np.abs(h - h.conj().T)) > tol or np.max(np.abs(h + h.T)) > tol:
        raise GaussianError("Hamiltonian is not self-dual (needs H = H^* = -H^T)")
    return h


def gibbs_state(h: np.ndarray, beta: float) -> np.ndarray:
    """Normalised ``exp((beta/2) <R, H R>)`` for a self-dual ``H``."""
    h = check_self_dual_hamiltonian(h)
    if not np.isfinite(beta):
        raise GaussianError("beta must be finite")
    q = 0.5 * beta * bilinear_element(h)
    if np.max(np.abs(q - q.conj().T)) > 1e-9 * max(1.0, np.max(np.abs(q))):
        raise GaussianError("quadratic element is not Hermitian")
    rho = operator_exp(q, hermitian=True)
    return rho / np.trace(rho).real


def field_coefficients(n_modes: int) -> np.ndarray:
    """Rows express ``a_1..a_n, a_1^*..a_n^*`` in the Majorana generators."""
    c = np.zeros((2 * n_modes, 2 * n_modes), dtype=complex)
    for k in range(n_modes):
        c[k, 2 * k] = 0.5
        c[k, 2 * k + 1] = 0.5j
        c[n_modes + k, 2 * k] = 0.5
        c[n_modes + k, 2 * k + 1] = -0.5j
    return c


def self_dual_swap(n_modes: int) -> np.ndarray:
    """Matrix of the swap ``psi_k <-> A psi_k``; the antiunitary map is this swap composed with conjugation."""
    s = np.zeros((2 * n_modes, 2 * n_modes))
    s[:n_modes, n_modes:] = np.eye(n_modes)
    s[n_modes:, :n_modes] = np.eye(n_modes)
    return s


def symbol_of(rho: np.ndarray) -> np.ndarray:
    """Two-point symbol ``S_mn = Tr(rho B_m B_n^*)`` with ``B = (a_1..a_n, a_1^*..a_n^*)``."""
    n = n_modes_of(rho)
    a = annihilators(n)
    fields = list(a) + [x.conj().T for x in a]
    size = 2 * n
    s = np.zeros((size, size), dtype=complex)
    for m in range(size):
        for k in range(size):
            s[m, k] = np.trace(rho @ fields[m] @ fields[k].conj().T)
    return s


def symbol_from_covariance(gamma: np.ndarray) -> np.ndarray:
    """Affine map ``S = 1/2 - i C Gamma C^*`` from covariance to symbol."""
    gamma = np.asarray(gamma)
    n = gamma.shape[0] // 2
    c = field_coefficients(n)
    return 0.5 * np.eye(2 * n) - 1j * c @ gamma @ c.conj().T


def random_orthogonal(size: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((size, size)))
    return q * np.sign(np.diag(r))


def random_covariance(
    n_modes: int,
    rng: np.random.Generator,
    *,
    max_abs: float = 0.95,
    min_abs: float = 0.0,
    pure: bool = False,
) -> np.ndarray:
    """Random covariance ``O^T (+) lambda_k J O`` with ``lambda_k`` drawn in ``[min_abs, max_abs]``."""
    if n_modes < 1:
        raise CliffordError("n_modes must be positive")
    lams = np.ones(n_modes) if pure else rng.uniform(min_abs, max_abs, n_modes)
    block = NormalForm(np.eye(2 * n_modes), lams).block_matrix()
    o = random_orthogonal(2 * n_modes, rng)
    g = o.T @ block @ o
    return 0.5 * (g - g.T)


def random_gaussian_state(n_modes: int, rng: np.random.Generator, **kwargs) -> GaussianState:
    return GaussianState(random_covariance(n_modes, rng, **kwargs))


def random_even_state(n_modes: int, rng: np.random.Generator, kind: str = "mixture") -> np.ndarray:
    """Random full-rank even density matrix that is generally not Gaussian.

    ``kind="mixture"`` mixes two random Gaussian states; ``kind="wishart"``
    projects a Wishart matrix onto the even subalgebra.
    """
    from .clifford import parity_operator

    if kind == "mixture":
        w = rng.uniform(0.2, 0.8)
        a = gaussian_state_from_covariance(random_covariance(n_modes, rng))
        b = gaussian_state_from_covariance(random_covariance(n_modes, rng))
        return w * a + (1 - w) * b
    if kind == "wishart":
        dim = 2**n_modes
        g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        rho = g @ g.conj().T
        p = parity_operator(n_modes)
        rho = 0.5 * (rho + p @ rho @ p)
        return rho / np.trace(rho).real
    raise GaussianError(f"unknown state kind {kind!r}")
