"""Entropy, relative entropy, fermionic Fisher information and the inequalities built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.integrate

from .channels import apply_beam_splitter_channel, semigroup_evolve
from .clifford import commutator, liouvillean, majoranas, n_modes_of, operator_exp, operator_log
from .reports import ExperimentReport

EIGEN_FLOOR = 1e-14
LOG_CLIP = 1e-12


def _eigh(rho: np.ndarray):
    return np.linalg.eigh(0.5 * (rho + rho.conj().T))


def von_neumann_entropy(rho: np.ndarray) -> float:
    w = _eigh(rho)[0]
    w = w[w > EIGEN_FLOOR]
    return float(-np.sum(w * np.log(w)))


def entropy_power(rho: np.ndarray) -> float:
    """``exp(S / n_modes)``; lies in ``[1, 2]`` for every state."""
    return math.exp(von_neumann_entropy(rho) / n_modes_of(rho))


@dataclass(frozen=True)
class DisplacedState:
    """``e^{theta X} rho e^{-theta X}`` with ``X = alpha R_j`` (or ``i alpha R_j`` when ``unitary``).

    The similarity is not unitary in the second case, so the logarithm is
    defined by conjugating ``ln rho``.
    """

    base: np.ndarray
    generator: int
    theta: float
    alpha: float = 1.0
    unitary: bool = True

    def _similarity(self) -> tuple[np.ndarray, np.ndarray]:
        r = majoranas(n_modes_of(self.base))[self.generator]
        x = (1j if self.unitary else 1.0) * self.alpha * self.theta * r
        # r^2 = 1, so the exponential has a closed form
        eye = np.eye(r.shape[0])
        if self.unitary:
            phi = self.alpha * self.theta
            fwd = math.cos(phi) * eye + 1j * math.sin(phi) * r
            bwd = math.cos(phi) * eye - 1j * math.sin(phi) * r
        else:
            phi = self.alpha * self.theta
            fwd = math.cosh(phi) * eye + math.sinh(phi) * r
            bwd = math.cosh(phi) * eye - math.sinh(phi) * r
        del x
        return fwd, bwd

    def matrix(self) -> np.ndarray:
        fwd, bwd = self._similarity()
        return fwd @ self.base @ bwd

    def log(self) -> np.ndarray:
        fwd, bwd = self._similarity()
        return fwd @ operator_log(self.base, LOG_CLIP)[0] @ bwd


def _support_violated(rho1: np.ndarray, w2: np.ndarray, v2: np.ndarray, tol: float = 1e-12) -> bool:
    kernel = v2[:, w2 <= tol]
    if kernel.shape[1] == 0:
        return False
    weight = np.real(np.einsum("ik,ij,jk->", kernel.conj(), rho1, kernel))
    return bool(weight > tol)


def relative_entropy(rho1: np.ndarray, rho2) -> float:
    """``Tr rho1 (ln rho1 - ln rho2)``; ``inf`` when ``rho1`` charges the kernel of ``rho2``."""
    w1, v1 = _eigh(rho1)
    keep = w1 > EIGEN_FLOOR
    first = float(np.sum(w1[keep] * np.log(w1[keep])))
    if isinstance(rho2, DisplacedState):
        second = complex(np.trace(rho1 @ rho2.log()))
        return first - second.real
    w2, v2 = _eigh(rho2)
    if _support_violated(rho1, w2, v2):
        return math.inf
    mask = w2 > LOG_CLIP
    diag = np.real(np.einsum("ik,ij,jk->k", v2.conj(), rho1, v2))
    second = float(np.sum(diag[mask] * np.log(w2[mask])))
    return first - second


def fisher_info(rho: np.ndarray, j: int, alpha: float = 1.0) -> float:
    """``J = Tr(rho [X, [X, ln rho]])`` for ``X = alpha R_j``.

    Equals ``2 alpha^2 S(R_j rho R_j || rho)``, hence nonnegative; it is the
    curvature at 0 of ``theta -> S(rho || e^{i theta X} rho e^{-i theta X})``.
    """
    x = alpha * majoranas(n_modes_of(rho))[j]
    log_rho, _ = operator_log(rho, LOG_CLIP)
    return float(np.real(np.trace(rho @ commutator(x, commutator(x, log_rho)))))


def fisher_info_fd(
    rho: np.ndarray, j: int, h: float = 1e-3, *, alpha: float = 1.0, unitary: bool = True
) -> float:
    """Second central difference of ``theta -> S(rho || rho_theta)`` at 0.

    With ``unitary=False`` the displacement is the similarity ``e^{theta R_j}``;
    the curvature then comes out as ``-fisher_info``.
    """
    if not 1e-5 <= h <= 1e-2:
        raise ValueError("step must lie in [1e-5, 1e-2]")
    plus = relative_entropy(rho, DisplacedState(rho, j, h, alpha, unitary))
    minus = relative_entropy(rho, DisplacedState(rho, j, -h, alpha, unitary))
    return (plus + minus) / h**2


def fisher_info_richardson(rho: np.ndarray, j: int, h: float = 1e-2, **kwargs) -> float:
    coarse = fisher_info_fd(rho, j, h, **kwargs)
    fine = fisher_info_fd(rho, j, h / 2, **kwargs)
    return (4 * fine - coarse) / 3


def entropy_variation_rate(rho: np.ndarray) -> float:
    """Total Fisher information over all generators."""
    n = n_modes_of(rho)
    return float(sum(fisher_info(rho, j) for j in range(2 * n)))


def entropy_rate_from_generator(rho: np.ndarray) -> float:
    """``-Tr(L(rho) ln rho)``, the time derivative of the entropy along the semigroup."""
    log_rho, _ = operator_log(rho, LOG_CLIP)
    return float(-np.real(np.trace(liouvillean(rho) @ log_rho)))


@dataclass(frozen=True)
class EntropyReport:
    entropy: float
    entropy_power: float
    fisher: tuple[float, ...]
    total_fisher: float
    clipped: bool


def entropy_report(rho: np.ndarray) -> EntropyReport:
    n = n_modes_of(rho)
    _, clipped = operator_log(rho, LOG_CLIP)
    fisher = tuple(fisher_info(rho, j) for j in range(2 * n))
    return EntropyReport(
        entropy=von_neumann_entropy(rho),
        entropy_power=entropy_power(rho),
        fisher=fisher,
        total_fisher=float(sum(fisher)),
        clipped=clipped,
    )


@dataclass(frozen=True)
class DeBruijnPoint:
    t: float
    entropy_rate: float
    fisher: float
    relative_defect: float


def debruijn_check(rho: np.ndarray, times, h: float = 1e-4) -> list[DeBruijnPoint]:
    """Central-difference ``dS/dt`` against the total Fisher information along ``exp(tL)``."""
    out = []
    for t in times:
        if t < h:
            raise ValueError("time points must be at least the difference step")
        rho_t = semigroup_evolve(rho, t)
        rate = (
            von_neumann_entropy(semigroup_evolve(rho, t + h))
            - von_neumann_entropy(semigroup_evolve(rho, t - h))
        ) / (2 * h)
        fisher = entropy_variation_rate(rho_t)
        out.append(DeBruijnPoint(t, rate, fisher, abs(rate - fisher) / max(fisher, 1e-6)))
    return out


@dataclass(frozen=True)
class StamResult:
    fisher_a: float
    fisher_b: float
    fisher_out: float
    weighted_slack: float
    harmonic_slack: float | None
    skipped: bool


def stam_check(
    rho_a: np.ndarray, rho_b: np.ndarray, lam: float, alpha: float, beta: float
) -> StamResult:
    """Slacks of ``eta^2 J_out <= alpha^2 J_A + beta^2 J_B`` and ``lam/J_A + (1-lam)/J_B <= 1/J_out``."""
    j_a = entropy_variation_rate(rho_a)
    j_b = entropy_variation_rate(rho_b)
    out = apply_beam_splitter_channel(rho_a, rho_b, lam)
    j_out = entropy_variation_rate(out)
    eta = math.sqrt(lam) * alpha + math.sqrt(1 - lam) * beta
    weighted = alpha**2 * j_a + beta**2 * j_b - eta**2 * j_out
    tiny = 1e-12
    if min(j_a, j_b, j_out) <= tiny:
        return StamResult(j_a, j_b, j_out, weighted, None, True)
    harmonic = 1.0 / j_out - (lam / j_a + (1 - lam) / j_b)
    return StamResult(j_a, j_b, j_out, weighted, harmonic, False)


def epi_gap(rho_a: np.ndarray, rho_b: np.ndarray, lam: float) -> float:
    """``E(out) - lam E(A) - (1 - lam) E(B)``; nonnegative when the inequality holds."""
    out = apply_beam_splitter_channel(rho_a, rho_b, lam)
    return entropy_power(out) - lam * entropy_power(rho_a) - (1 - lam) * entropy_power(rho_b)


@dataclass
class ProofTrace:
    times: np.ndarray
    ratio: np.ndarray
    entropy_powers: np.ndarray = field(repr=False)

    @property
    def max_drop(self) -> float:
        diffs = np.diff(self.ratio)
        return float(max(0.0, -diffs.min())) if diffs.size else 0.0


def epi_proof_trace(rho_a: np.ndarray, rho_b: np.ndarray, lam: float, times) -> ProofTrace:
    """``(lam E_A(t) + (1-lam) E_B(t)) / E_out(t)`` with all three states diffused for the same time.

    A common time keeps the channel output of the evolved inputs equal to
    the evolved output, so ``E_out(t)`` is unambiguous.
    """
    rho_out = apply_beam_splitter_channel(rho_a, rho_b, lam)
    times = np.asarray(times, dtype=float)
    powers = np.zeros((len(times), 3))
    for k, t in enumerate(times):
        powers[k] = [
            entropy_power(semigroup_evolve(rho_a, t)),
            entropy_power(semigroup_evolve(rho_b, t)),
            entropy_power(semigroup_evolve(rho_out, t)),
        ]
    ratio = (lam * powers[:, 0] + (1 - lam) * powers[:, 1]) / powers[:, 2]
    return ProofTrace(times, ratio, powers)


def epi_check(rho_a: np.ndarray, rho_b: np.ndarray, lam: float, times=None, tol: float = 1e-10) -> ExperimentReport:
    """Entropy power inequality for one input pair, with the interpolation-ratio trace."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    times = np.linspace(0.0, 3.0, 16) if times is None else times
    rep = ExperimentReport("epi-check", {"lambda": lam})
    rep.add_min("E_out - lam E_A - (1-lam) E_B", epi_gap(rho_a, rho_b, lam), -tol)
    tr = epi_proof_trace(rho_a, rho_b, lam, times)
    rep.add_max("largest drop of the interpolation ratio", tr.max_drop, 1e-9)
    rep.add_max("|1 - ratio| at the last time", abs(1 - tr.ratio[-1]), 1e-6)
    for t, r, (ea, eb, eo) in zip(tr.times, tr.ratio, tr.entropy_powers):
        rep.rows.append({"t": float(t), "E_A": ea, "E_B": eb, "E_I": eo, "ratio": float(r)})
    return rep


def _log_quadrature_tail(rho: np.ndarray, cutoff: float) -> np.ndarray:
    eye = np.eye(rho.shape[0])
    d = rho - eye
    return d / cutoff - d @ (rho + eye) / (2 * cutoff**2)


def log_by_quadrature(rho: np.ndarray, cutoff: float = 1e4, epsabs: float = 1e-12) -> np.ndarray:
    """``ln rho = int_0^inf ((1+x)^{-1} - (x+rho)^{-1}) dx`` with an asymptotic tail past ``cutoff``."""
    eye = np.eye(rho.shape[0])

    def integrand(x: float) -> np.ndarray:
        return eye / (1 + x) - np.linalg.inv(x * eye + rho)

    body, _ = scipy.integrate.quad_vec(integrand, 0.0, cutoff, epsabs=epsabs, epsrel=1e-12, limit=2000)
    return body + _log_quadrature_tail(rho, cutoff)


def log_difference_by_quadrature(
    rho1: np.ndarray, rho2: np.ndarray, cutoff: float = 1e4, epsabs: float = 1e-12
) -> np.ndarray:
    """``ln rho2 - ln rho1 = int_0^inf (x+rho1)^{-1} (rho2 - rho1) (x+rho2)^{-1} dx``."""
    eye = np.eye(rho1.shape[0])
    diff = rho2 - rho1

    def integrand(x: float) -> np.ndarray:
        return np.linalg.inv(x * eye + rho1) @ diff @ np.linalg.inv(x * eye + rho2)

    body, _ = scipy.integrate.quad_vec(integrand, 0.0, cutoff, epsabs=epsabs, epsrel=1e-12, limit=2000)
    tail = diff / cutoff - (rho1 @ diff + diff @ rho2) / (2 * cutoff**2)
    return body + tail


@dataclass(frozen=True)
class QuadratureReport:
    log_defect: float
    difference_defect: float


def functional_identity_check(rho1: np.ndarray, rho2: np.ndarray) -> QuadratureReport:
    exact1 = operator_log(rho1)[0]
    exact2 = operator_log(rho2)[0]
    return QuadratureReport(
        log_defect=float(np.max(np.abs(log_by_quadrature(rho1) - exact1))),
        difference_defect=float(
            np.max(np.abs(log_difference_by_quadrature(rho1, rho2) - (exact2 - exact1)))
        ),
    )


def unitary_conjugate(rho: np.ndarray, x: np.ndarray) -> np.ndarray:
    u = operator_exp(1j * x)
    return u @ rho @ u.conj().T
