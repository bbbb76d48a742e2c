"""Beam-splitter channel on a pair of registers and the fermionic heat semigroup."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse.linalg

from .clifford import (
    CliffordError,
    annihilators,
    is_even,
    liouvillean,
    liouvillean_superoperator,
    majoranas,
    n_modes_of,
    operator_exp,
)
from .gaussian import covariance_of


class ChannelError(ValueError):
    """Raised for invalid channel inputs."""


def _check_lambda(lam: float) -> float:
    lam = float(lam)
    if not 0.0 <= lam <= 1.0 or not math.isfinite(lam):
        raise ChannelError(f"transmissivity must lie in [0, 1], got {lam!r}")
    return lam


def mixing_angle(lam: float) -> float:
    """Angle with ``cos = sqrt(lam)`` and ``sin = sqrt(1 - lam)``."""
    lam = _check_lambda(lam)
    return math.atan2(math.sqrt(1.0 - lam), math.sqrt(lam))


@dataclass(frozen=True)
class CompositeSystem:
    """Two registers of ``n_modes`` modes laid out on one chain of ``2 n_modes`` modes.

    Register A owns modes ``0..n-1`` (generators ``R``), register B owns the rest
    (generators ``S``). Cross-register generators anticommute.
    """

    n_modes: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_modes <= 3:
            raise CliffordError("composite systems support 1 to 3 modes per register")

    @property
    def total_modes(self) -> int:
        return 2 * self.n_modes

    @property
    def register_a(self) -> tuple[np.ndarray, ...]:
        return majoranas(self.total_modes)[: 2 * self.n_modes]

    @property
    def register_b(self) -> tuple[np.ndarray, ...]:
        return majoranas(self.total_modes)[2 * self.n_modes :]

    def embed(self, rho_a: np.ndarray, rho_b: np.ndarray, *, check_even: bool = True) -> np.ndarray:
        for name, rho in (("A", rho_a), ("B", rho_b)):
            if n_modes_of(rho) != self.n_modes:
                raise ChannelError(f"register {name} state has the wrong number of modes")
            if check_even and not is_even(rho, tol=1e-10):
                raise ChannelError(f"register {name} state is not even")
        return np.kron(rho_a, rho_b)

    def partial_trace_b(self, rho: np.ndarray) -> np.ndarray:
        d = 2**self.n_modes
        return np.einsum("ikjk->ij", rho.reshape(d, d, d, d))

    def cross_car_defect(self) -> float:
        worst = 0.0
        for r in self.register_a:
            for s in self.register_b:
                worst = max(worst, float(np.max(np.abs(r @ s + s @ r))))
        return worst


@lru_cache(maxsize=64)
def _beam_splitter_cached(n_modes: int, lam: float) -> np.ndarray:
    system = CompositeSystem(n_modes)
    theta = mixing_angle(lam)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    dim = 2**system.total_modes
    u = np.eye(dim, dtype=complex)
    # the products R_j S_j commute pairwise and square to -1
    for r, sj in zip(system.register_a, system.register_b):
        u = u @ (c * np.eye(dim) + s * (r @ sj))
    u.setflags(write=False)
    return u


def beam_splitter_unitary(n_modes: int, lam: float) -> np.ndarray:
    """``U = exp((theta/2) sum_j R_j S_j)`` so that ``U^* R_j U = sqrt(lam) R_j + sqrt(1-lam) S_j``."""
    return _beam_splitter_cached(int(n_modes), _check_lambda(lam))


def beam_splitter_generator(n_modes: int) -> np.ndarray:
    system = CompositeSystem(n_modes)
    return sum(r @ s for r, s in zip(system.register_a, system.register_b))


def heisenberg_defect(n_modes: int, lam: float) -> float:
    """Largest deviation from ``U^* R_j U = sqrt(lam) R_j + sqrt(1-lam) S_j``."""
    system = CompositeSystem(n_modes)
    u = beam_splitter_unitary(n_modes, lam)
    a, b = math.sqrt(lam), math.sqrt(1.0 - lam)
    worst = 0.0
    for r, s in zip(system.register_a, system.register_b):
        worst = max(worst, float(np.max(np.abs(u.conj().T @ r @ u - (a * r + b * s)))))
    return worst


def mode_mixing_matrix(lam: float) -> np.ndarray:
    a, b = math.sqrt(lam), math.sqrt(1.0 - lam)
    return np.array([[a, b], [-b, a]])


def field_mode_mixing_check(n_modes: int, lam: float) -> float:
    """Defect of ``U^* (a_j, b_j) U = M (a_j, b_j)`` for the annihilators of both registers."""
    system = CompositeSystem(n_modes)
    u = beam_splitter_unitary(n_modes, lam)
    ann = annihilators(system.total_modes)
    m = mode_mixing_matrix(lam)
    worst = 0.0
    for j in range(n_modes):
        pair = (ann[j], ann[n_modes + j])
        for row in range(2):
            lhs = u.conj().T @ pair[row] @ u
            rhs = m[row, 0] * pair[0] + m[row, 1] * pair[1]
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


def apply_beam_splitter_channel(rho_a: np.ndarray, rho_b: np.ndarray, lam: float) -> np.ndarray:
    """``Tr_B(U^* (rho_A (x) rho_B) U)``; the endpoints return the matching input."""
    lam = _check_lambda(lam)
    n = n_modes_of(rho_a)
    system = CompositeSystem(n)
    joint = system.embed(rho_a, rho_b)
    if lam == 1.0:
        return np.array(rho_a, dtype=complex)
    if lam == 0.0:
        return np.array(rho_b, dtype=complex)
    u = beam_splitter_unitary(n, lam)
    out = system.partial_trace_b(u.conj().T @ joint @ u)
    return 0.5 * (out + out.conj().T)


def covariance_mixing_defect(rho_a: np.ndarray, rho_b: np.ndarray, lam: float) -> float:
    """``|Gamma_out - lam Gamma_A - (1-lam) Gamma_B|_max``."""
    out = apply_beam_splitter_channel(rho_a, rho_b, lam)
    expected = lam * covariance_of(rho_a) + (1 - lam) * covariance_of(rho_b)
    return float(np.max(np.abs(covariance_of(out) - expected)))


def semigroup_evolve(rho: np.ndarray, t: float) -> np.ndarray:
    """``exp(t L) rho`` through the sparse vectorised generator."""
    if t < 0:
        raise ChannelError("the semigroup is only defined for t >= 0")
    n = n_modes_of(rho)
    if t == 0:
        return np.array(rho, dtype=complex)
    sup = liouvillean_superoperator(n)
    vec = scipy.sparse.linalg.expm_multiply(t * sup, np.asarray(rho, dtype=complex).reshape(-1))
    out = vec.reshape(rho.shape)
    return 0.5 * (out + out.conj().T)


def semigroup_evolve_rk4(rho: np.ndarray, t: float, steps: int = 400) -> np.ndarray:
    """Fixed-step fourth-order Runge-Kutta integration of ``d rho/dt = L rho``."""
    h = t / steps
    x = np.array(rho, dtype=complex)
    for _ in range(steps):
        k1 = liouvillean(x)
        k2 = liouvillean(x + 0.5 * h * k1)
        k3 = liouvillean(x + 0.5 * h * k2)
        k4 = liouvillean(x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return x


def semigroup_evolve_spectral(rho: np.ndarray, t: float) -> np.ndarray:
    """Exact evolution in the Majorana-monomial basis where the generator is diagonal."""
    from itertools import combinations

    n = n_modes_of(rho)
    r = majoranas(n)
    dim = 2**n
    out = np.zeros_like(rho, dtype=complex)
    for k in range(2 * n + 1):
        # a degree-k monomial picks up 2*(sign - 1) from every generator
        rate = -4 * k if k % 2 == 0 else -4 * (2 * n - k)
        for subset in combinations(range(2 * n), k):
            mono = np.eye(dim, dtype=complex)
            for i in subset:
                mono = mono @ r[i]
            coeff = np.trace(mono.conj().T @ rho) / dim
            if coeff != 0:
                out += math.exp(rate * t) * coeff * mono
    return out


def choi_matrix(channel, n_modes: int) -> np.ndarray:
    """``sum_ij |i><j| (x) channel(|i><j|)`` on ``n_modes`` input modes."""
    dim = 2**n_modes
    blocks = np.zeros((dim, dim, dim, dim), dtype=complex)
    for i in range(dim):
        for j in range(dim):
            unit = np.zeros((dim, dim), dtype=complex)
            unit[i, j] = 1.0
            blocks[i, :, j, :] = channel(unit)
    return blocks.reshape(dim * dim, dim * dim)


@dataclass(frozen=True)
class CPTPReport:
    min_eigenvalue: float
    trace_defect: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.min_eigenvalue >= -tol and self.trace_defect <= tol


def cptp_check(channel, n_modes: int) -> CPTPReport:
    dim = 2**n_modes
    choi = choi_matrix(channel, n_modes)
    choi = 0.5 * (choi + choi.conj().T)
    min_eig = float(np.linalg.eigvalsh(choi).min())
    reduced = np.einsum("ikjk->ij", choi.reshape(dim, dim, dim, dim))
    return CPTPReport(min_eig, float(np.max(np.abs(reduced - np.eye(dim)))))


def beam_splitter_as_map(rho_b: np.ndarray, lam: float):
    """Linear map ``X -> Tr_B(U^* (X (x) rho_B) U)`` for a fixed environment."""
    n = n_modes_of(rho_b)
    system = CompositeSystem(n)
    u = beam_splitter_unitary(n, lam)

    def channel(x: np.ndarray) -> np.ndarray:
        return system.partial_trace_b(u.conj().T @ np.kron(x, rho_b) @ u)

    return channel


@dataclass(frozen=True)
class TimeCompatibility:
    covariance_defect: float
    state_defect: float
    t_out: float


def semigroup_time_compatibility(
    rho_a: np.ndarray, rho_b: np.ndarray, lam: float, t_a: float, t_b: float
) -> TimeCompatibility:
    """Compare the channel output of evolved inputs with the evolved output at ``lam t_a + (1-lam) t_b``."""
    t_out = lam * t_a + (1 - lam) * t_b
    lhs = apply_beam_splitter_channel(semigroup_evolve(rho_a, t_a), semigroup_evolve(rho_b, t_b), lam)
    rhs = semigroup_evolve(apply_beam_splitter_channel(rho_a, rho_b, lam), t_out)
    return TimeCompatibility(
        covariance_defect=float(np.max(np.abs(covariance_of(lhs) - covariance_of(rhs)))),
        state_defect=float(np.max(np.abs(lhs - rhs))),
        t_out=t_out,
    )


def unitary_check(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def beam_splitter_unitary_expm(n_modes: int, lam: float) -> np.ndarray:
    """Same unitary through a generic matrix exponential; used as a cross-check."""
    theta = mixing_angle(lam)
    return operator_exp(0.5 * theta * beam_splitter_generator(n_modes), hermitian=False)
