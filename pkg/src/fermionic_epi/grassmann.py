"""Grassmann algebra over several copies of the self-dual one-particle space.

A generator is labelled by ``(copy, base, starred)``: ``starred=False`` is the
basis vector ``psi_base`` of the chosen basis projection and ``starred=True``
is its image under the antiunitary involution. Monomials are bitmasks over
generators in the canonical order ``(copy, base, starred)``; a bitmask stands
for the wedge product of its generators in that order.

Coefficients stay exact when the inputs are ``int``/``Fraction``; anything else
is carried as floating point.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .clifford import annihilators


class GrassmannError(ValueError):
    """Raised for mismatched universes or unsupported operations."""


class GeneratorLabel(NamedTuple):
    copy: int
    base: int
    starred: bool


@dataclass(frozen=True)
class GrassmannUniverse:
    """Index bookkeeping for ``n_modes`` modes; copies are allocated on demand."""

    n_modes: int

    def __post_init__(self) -> None:
        if not 1 <= self.n_modes <= 4:
            raise GrassmannError("Grassmann universes support 1 to 4 modes")

    @property
    def per_copy(self) -> int:
        return 2 * self.n_modes

    def bit(self, label: GeneratorLabel) -> int:
        copy, base, starred = label
        if copy < 0 or not 0 <= base < self.n_modes:
            raise GrassmannError(f"label {label} is outside the universe")
        return copy * self.per_copy + 2 * base + int(bool(starred))

    def label(self, bit: int) -> GeneratorLabel:
        copy, rest = divmod(bit, self.per_copy)
        return GeneratorLabel(copy, rest // 2, bool(rest % 2))

    def copy_mask(self, copy: int) -> int:
        return ((1 << self.per_copy) - 1) << (copy * self.per_copy)

    def copies_in(self, mask: int) -> set[int]:
        return {self.label(b).copy for b in _bits(mask)}


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def _wedge_sign(a: int, b: int) -> int:
    """Sign of ``m_a ^ m_b = sign * m_{a|b}`` for disjoint masks."""
    swaps = 0
    for j in _bits(b):
        swaps += (a >> (j + 1)).bit_count()
    return -1 if swaps & 1 else 1


def _sort_sign(seq: list[int]) -> tuple[int, int]:
    """Sign and mask of the wedge of generators listed in ``seq`` (0 sign for repeats)."""
    if len(set(seq)) != len(seq):
        return 0, 0
    inversions = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    mask = 0
    for b in seq:
        mask |= 1 << b
    return (-1 if inversions & 1 else 1), mask


def _is_zero(c) -> bool:
    return c == 0


class Multivector:
    """Immutable element of the Grassmann algebra."""

    __slots__ = ("universe", "terms")

    def __init__(self, universe: GrassmannUniverse, terms: dict[int, object] | None = None):
        self.universe = universe
        self.terms = {m: c for m, c in (terms or {}).items() if not _is_zero(c)}

    # construction helpers -------------------------------------------------
    @classmethod
    def scalar(cls, universe: GrassmannUniverse, value=1) -> "Multivector":
        return cls(universe, {0: value})

    @classmethod
    def generator(cls, universe: GrassmannUniverse, base: int, starred: bool = False, copy: int = 0):
        return cls(universe, {1 << universe.bit(GeneratorLabel(copy, base, starred)): 1})

    @classmethod
    def monomial(cls, universe: GrassmannUniverse, mask: int, coeff=1) -> "Multivector":
        return cls(universe, {mask: coeff})

    # algebra --------------------------------------------------------------
    def _same(self, other: "Multivector") -> None:
        if not isinstance(other, Multivector):
            raise GrassmannError("expected a Multivector")
        if other.universe != self.universe:
            raise GrassmannError("multivectors live in different universes")

    def __add__(self, other):
        if not isinstance(other, Multivector):
            other = Multivector.scalar(self.universe, other)
        self._same(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return Multivector(self.universe, out)

    __radd__ = __add__

    def __neg__(self):
        return Multivector(self.universe, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, value):
        if isinstance(value, Multivector):
            raise GrassmannError("use wedge() or circle_product() to multiply multivectors")
        return Multivector(self.universe, {m: c * value for m, c in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, float, complex)):
            other = Multivector.scalar(self.universe, other)
        if not isinstance(other, Multivector) or other.universe != self.universe:
            return NotImplemented
        return (self - other).terms == {}

    def __hash__(self):
        return hash((self.universe, frozenset(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return "Multivector(0)"
        parts = []
        for m in sorted(self.terms, key=lambda x: (x.bit_count(), x)):
            labels = [self.universe.label(b) for b in _bits(m)]
            name = "^".join(f"{'A' if l.starred else ''}psi{l.base}({l.copy})" for l in labels) or "1"
            parts.append(f"{self.terms[m]}*{name}")
        return "Multivector(" + " + ".join(parts) + ")"

    # inspection -----------------------------------------------------------
    def max_abs_diff(self, other: "Multivector") -> float:
        diff = (self - other).terms
        return max((abs(complex(c)) for c in diff.values()), default=0.0)

    def isclose(self, other: "Multivector", tol: float = 1e-12) -> bool:
        return self.max_abs_diff(other) <= tol

    def scalar_part(self):
        return self.terms.get(0, 0)

    def is_even(self) -> bool:
        return all(m.bit_count() % 2 == 0 for m in self.terms)

    def copies(self) -> set[int]:
        out: set[int] = set()
        for m in self.terms:
            out |= self.universe.copies_in(m)
        return out


def wedge(a: Multivector, b: Multivector) -> Multivector:
    a._same(b)
    out: dict[int, object] = {}
    for ma, ca in a.terms.items():
        for mb, cb in b.terms.items():
            if ma & mb:
                continue
            m = ma | mb
            out[m] = out.get(m, 0) + _wedge_sign(ma, mb) * ca * cb
    return Multivector(a.universe, out)


def berezin_derivative(xi: Multivector, label: GeneratorLabel) -> Multivector:
    """Left derivative: removes the generator after moving it to the front."""
    bit = xi.universe.bit(label)
    flag = 1 << bit
    below = flag - 1
    out = {}
    for m, c in xi.terms.items():
        if m & flag:
            sign = -1 if (m & below).bit_count() & 1 else 1
            out[m ^ flag] = sign * c
    return Multivector(xi.universe, out)


def _integral_sign(mask: int, universe: GrassmannUniverse, copy: int) -> int:
    """Sign picked up by ``prod_i d/dpsi_i d/d(A psi_i)`` acting on a monomial containing the whole copy."""
    sign = 1
    for base in range(universe.n_modes):
        for starred in (True, False):
            bit = universe.bit(GeneratorLabel(copy, base, starred))
            if (mask & ((1 << bit) - 1)).bit_count() & 1:
                sign = -sign
            mask ^= 1 << bit
    return sign


def berezin_integral(xi: Multivector, copy: int = 0) -> Multivector:
    """Apply ``prod_i (d/dpsi_i)(d/d(A psi_i))`` over every mode of ``copy``."""
    u = xi.universe
    full = u.copy_mask(copy)
    out: dict[int, object] = {}
    for m, c in xi.terms.items():
        if m & full == full:
            rest = m ^ full
            out[rest] = out.get(rest, 0) + _integral_sign(m, u, copy) * c
    return Multivector(u, out)


def relabel(xi: Multivector, mapping: Callable[[GeneratorLabel], GeneratorLabel]) -> Multivector:
    """Substitute generators label by label, keeping the order inside each monomial."""
    u = xi.universe
    out: dict[int, object] = {}
    for m, c in xi.terms.items():
        seq = [u.bit(mapping(u.label(b))) for b in _bits(m)]
        sign, mask = _sort_sign(seq)
        if sign:
            out[mask] = out.get(mask, 0) + sign * c
    return Multivector(u, out)


def copy_map(xi: Multivector, starred_from: int, plain_from: int, starred_to: int, plain_to: int):
    """Move starred generators ``starred_from -> starred_to`` and plain ones ``plain_from -> plain_to``."""

    def mapping(label: GeneratorLabel) -> GeneratorLabel:
        if label.starred and label.copy == starred_from:
            return GeneratorLabel(starred_to, label.base, True)
        if not label.starred and label.copy == plain_from:
            return GeneratorLabel(plain_to, label.base, False)
        return label

    return relabel(xi, mapping)


def involution(xi: Multivector) -> Multivector:
    """Antilinear ``(x ^ y)^* = y^* ^ x^*`` that swaps ``psi`` with its starred partner."""
    u = xi.universe
    out: dict[int, object] = {}
    for m, c in xi.terms.items():
        seq = [b ^ 1 for b in reversed(_bits(m))]
        sign, mask = _sort_sign(seq)
        out[mask] = out.get(mask, 0) + sign * _conj(c)
    return Multivector(u, out)


def _conj(c):
    return c.conjugate() if hasattr(c, "conjugate") else c


def pairing(universe: GrassmannUniverse, left: int, right: int) -> Multivector:
    """``sum_j (A psi_j)^(left) ^ psi_j^(right)``."""
    total = Multivector(universe)
    for j in range(universe.n_modes):
        total = total + wedge(
            Multivector.generator(universe, j, True, left),
            Multivector.generator(universe, j, False, right),
        )
    return total


def exp_series(x: Multivector, product: Callable | None = None, max_terms: int = 64) -> Multivector:
    """Power series of the exponential; ``x`` must be nilpotent for ``product`` (wedge by default)."""
    product = product or wedge
    if x.scalar_part() != 0:
        raise GrassmannError("exponential of an element with a scalar part is not supported")
    total = Multivector.scalar(x.universe, 1)
    term = total
    for k in range(1, max_terms):
        term = product(term, x) * Fraction(1, k)
        if not term.terms:
            return total
        total = total + term
    raise GrassmannError("exponential series did not terminate")


@lru_cache(maxsize=32)
def _circle_kernel(universe: GrassmannUniverse, copy: int, aux: int):
    x = (
        -pairing(universe, copy, copy)
        + pairing(universe, copy, aux)
        - pairing(universe, aux, aux)
        + pairing(universe, aux, copy)
    )
    kernel = exp_series(x)
    aux_full = universe.copy_mask(aux)
    grouped: dict[int, list[tuple[int, object]]] = {}
    for m, c in kernel.terms.items():
        grouped.setdefault(m & aux_full, []).append((m, c))
    return grouped


def _fresh_copy(*elements: Multivector) -> int:
    used = set()
    for e in elements:
        used |= e.copies()
    return max(used | {0}) + 1


def circle_product(a: Multivector, b: Multivector, copy: int = 0, aux: int | None = None) -> Multivector:
    """Product induced on ``copy`` by the Gaussian Berezin kernel.

    ``(-1)^n int d(aux) k(a) k(b) exp(-<h,h> + <h,h'> - <h',h'> + <h',h>)`` where
    ``h'`` lives on an auxiliary copy, ``k(a)`` moves the plain generators of
    ``a`` and ``k(b)`` the starred generators of ``b`` onto it. Generators of
    other copies ride along as Grassmann-valued coefficients.
    """
    a._same(b)
    u = a.universe
    if aux is None:
        aux = max(_fresh_copy(a, b), copy + 1)
    if aux == copy:
        raise GrassmannError("auxiliary copy must differ from the product copy")
    left = copy_map(a, copy, copy, copy, aux)
    right = copy_map(b, copy, copy, aux, copy)
    grouped = _circle_kernel(u, copy, aux)
    aux_full = u.copy_mask(aux)
    prefactor = -1 if u.n_modes % 2 else 1
    out: dict[int, object] = {}
    for ml, cl in left.terms.items():
        for mr, cr in right.terms.items():
            if ml & mr:
                continue
            m = ml | mr
            coeff = _wedge_sign(ml, mr) * cl * cr
            need = aux_full & ~m
            for mk, ck in grouped.get(need, ()):
                if mk & m:
                    continue
                total = m | mk
                val = _wedge_sign(m, mk) * _integral_sign(total, u, aux) * coeff * ck
                rest = total ^ aux_full
                out[rest] = out.get(rest, 0) + prefactor * val
    return Multivector(u, out)


def circle_power(x: Multivector, k: int, copy: int = 0) -> Multivector:
    out = Multivector.scalar(x.universe, 1)
    for _ in range(k):
        out = circle_product(out, x, copy)
    return out


def monomial_basis(universe: GrassmannUniverse, copy: int = 0) -> list[Multivector]:
    bits = _bits(universe.copy_mask(copy))
    out = []
    for k in range(len(bits) + 1):
        for combo in itertools.combinations(bits, k):
            out.append(Multivector.monomial(universe, sum(1 << b for b in combo)))
    return out


# ---------------------------------------------------------------------------
# matrix picture

@lru_cache(maxsize=None)
def _integer_fields(n_modes: int) -> tuple[np.ndarray, ...]:
    out = []
    for a in annihilators(n_modes):
        ai = np.rint(a.real).astype(np.int64)
        if np.max(np.abs(a - ai)) > 1e-15:
            raise GrassmannError("annihilators are expected to be integer matrices")
        out.append(ai)
    return tuple(out)


def _monomial_matrix(universe: GrassmannUniverse, mask: int, copy: int) -> np.ndarray:
    """Anti-normally ordered product: annihilators (starred) to the left, creators to the right."""
    n = universe.n_modes
    fields = _integer_fields(n)
    labels = [universe.label(b) for b in _bits(mask)]
    if any(l.copy != copy for l in labels):
        raise GrassmannError("element involves generators outside the represented copy")
    starred = [l for l in labels if l.starred]
    plain = [l for l in labels if not l.starred]
    ordered = starred + plain
    sign, _ = _sort_sign([universe.bit(l) for l in ordered])
    mat = np.eye(2**n, dtype=np.int64)
    for l in starred:
        mat = mat @ fields[l.base]
    for l in plain:
        mat = mat @ fields[l.base].T
    return sign * mat


def kappa_iso(xi: Multivector, copy: int = 0, exact: bool = False) -> np.ndarray:
    """Operator represented by a Grassmann element.

    Generators map to fields (starred ``A psi_k`` to ``a_k``, plain ``psi_k`` to
    ``a_k^*``), and a monomial maps to the anti-normally ordered product.
    ``exact=True`` returns an object array with the original coefficients.
    """
    u = xi.universe
    dim = 2**u.n_modes
    if exact:
        out = np.zeros((dim, dim), dtype=object)
        out[:, :] = 0
    else:
        out = np.zeros((dim, dim), dtype=complex)
    for m, c in xi.terms.items():
        mat = _monomial_matrix(u, m, copy)
        if exact:
            out = out + mat.astype(object) * c
        else:
            out += complex(c) * mat
    return out


@lru_cache(maxsize=None)
def _basis_solver(n_modes: int):
    u = GrassmannUniverse(n_modes)
    basis = monomial_basis(u)
    cols = np.array([_monomial_matrix(u, next(iter(b.terms)), 0).reshape(-1) for b in basis]).T
    masks = [next(iter(b.terms)) for b in basis]
    return u, masks, np.linalg.inv(cols.astype(float))


def kappa_inv(a: np.ndarray) -> Multivector:
    """Grassmann element on copy 0 representing the matrix ``a`` (inverse of :func:`kappa_iso`)."""
    a = np.asarray(a)
    n = int(round(math.log2(a.shape[0])))
    u, masks, inv = _basis_solver(n)
    coeffs = inv @ a.reshape(-1).astype(complex)
    return Multivector(u, {m: complex(c) for m, c in zip(masks, coeffs) if abs(c) > 1e-15})


def grassmann_norm(xi: Multivector) -> float:
    """Operator norm transported from the matrix picture."""
    return float(np.linalg.norm(kappa_iso(xi), 2))


def field_element(universe: GrassmannUniverse, vector: Iterable[complex], copy: int = 0) -> Multivector:
    """Degree-one element for ``phi`` given in the basis ``(psi_1..psi_n, A psi_1..A psi_n)``."""
    vector = list(vector)
    n = universe.n_modes
    if len(vector) != 2 * n:
        raise GrassmannError("vector has the wrong length")
    out = Multivector(universe)
    for k, c in enumerate(vector):
        out = out + Multivector.generator(universe, k % n, k >= n, copy) * c
    return out


def basis_generator(universe: GrassmannUniverse, index: int, copy: int = 0) -> Multivector:
    n = universe.n_modes
    return Multivector.generator(universe, index % n, index >= n, copy)


def quadratic_element(universe: GrassmannUniverse, h: np.ndarray, copy: int = 0) -> Multivector:
    """``<H, h H> = sum_ij h_ij (A e_j) ^ e_i`` over the basis ``e``."""
    n = universe.n_modes
    h = np.asarray(h)
    out = Multivector(universe)
    for i in range(2 * n):
        for j in range(2 * n):
            if h[i, j] != 0:
                out = out + wedge(basis_generator(universe, (j + n) % (2 * n), copy), basis_generator(universe, i, copy)) * h[i, j]
    return out


def field_bilinear_matrix(h: np.ndarray) -> np.ndarray:
    """``<B, h B> = sum_ij h_ij B(e_j) B(e_i)^*`` with ``B(psi_k) = a_k`` and ``B(A psi_k) = a_k^*``."""
    h = np.asarray(h)
    n = h.shape[0] // 2
    a = annihilators(n)
    fields = list(a) + [x.conj().T for x in a]
    out = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(2 * n):
        for j in range(2 * n):
            out += h[i, j] * fields[j] @ fields[i].conj().T
    return out


def _check_diagonal_self_dual(c: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    c = np.asarray(c, dtype=complex)
    n = c.shape[0] // 2
    top, bottom = c[:n, :n], c[n:, n:]
    if np.max(np.abs(c[:n, n:]), initial=0) > tol or np.max(np.abs(c[n:, :n]), initial=0) > tol:
        raise GrassmannError("operator is not block diagonal for the basis projection")
    if np.max(np.abs(bottom + top.T)) > tol * max(1.0, np.max(np.abs(top))):
        raise GrassmannError("operator is not self-dual")
    return c


def gaussian_berezin_integral(c: np.ndarray, xi: Multivector) -> complex:
    """``det(C_P / 2) int d(H) exp((1/2) <H, C^{-1} H>) ^ xi`` for ``C`` diagonal in the basis projection."""
    c = _check_diagonal_self_dual(c)
    u = xi.universe
    n = u.n_modes
    top = c[:n, :n]
    kernel = exp_series(quadratic_element(u, np.linalg.inv(c)) * 0.5)
    value = berezin_integral(wedge(kernel, xi), 0).scalar_part()
    return complex(np.linalg.det(top) * value)


def gaussian_pair_kernel(c: np.ndarray) -> np.ndarray:
    """``<A e_k, C e_l>``, antisymmetric for self-dual ``C``."""
    n = c.shape[0] // 2
    swap = np.zeros_like(c)
    swap[:n, n:] = np.eye(n)
    swap[n:, :n] = np.eye(n)
    return swap @ c


def quadratic_integral(h: np.ndarray, universe: GrassmannUniverse) -> complex:
    """``int d(H) exp(<H, h H>)`` on copy 0."""
    value = berezin_integral(exp_series(quadratic_element(universe, h)), 0).scalar_part()
    return complex(value)


def weyl_generator(universe: GrassmannUniverse, k: int, l: int) -> Multivector:
    return pairing(universe, k, l) - pairing(universe, l, k)


def weyl_displacement(universe: GrassmannUniverse, k: int, l: int, *, circle: bool = True) -> Multivector:
    """Displacement of copy ``k`` by copy ``l``, exponentiated in the circle product on ``k``.

    ``circle=False`` exponentiates with the wedge product instead.
    """
    x = weyl_generator(universe, k, l)
    product = (lambda p, q: circle_product(p, q, copy=k)) if circle else wedge
    return exp_series(x, product)


def displacement_covariance_defects(universe: GrassmannUniverse, k: int = 0, l: int = 1, *, circle: bool = True):
    """``T^* o g o T - g - g^(l)`` for every generator ``g`` of copy ``k``."""
    t = weyl_displacement(universe, k, l, circle=circle)
    t_star = involution(t)
    out = {}
    for base in range(universe.n_modes):
        for starred in (False, True):
            g = Multivector.generator(universe, base, starred, k)
            shifted = Multivector.generator(universe, base, starred, l)
            lhs = circle_product(circle_product(t_star, g, k), t, k)
            out[(base, starred)] = lhs - g - shifted
    return out


def displacement_composition_defect(
    universe: GrassmannUniverse, k: int = 0, l: int = 1, m: int = 2, *, phase_sign: int = 1
) -> Multivector:
    """``T(l + m) - T(l) o T(m) ^ exp(phase_sign/2 * (psi^l, J psi^m))``."""
    x_sum = weyl_generator(universe, k, l) + weyl_generator(universe, k, m)
    t_sum = exp_series(x_sum, lambda p, q: circle_product(p, q, copy=k))
    t_l = weyl_displacement(universe, k, l)
    t_m = weyl_displacement(universe, k, m)
    form = Multivector(universe)
    for j in range(universe.n_modes):
        form = form + wedge(Multivector.generator(universe, j, False, l), Multivector.generator(universe, j, True, m))
        form = form + wedge(Multivector.generator(universe, j, True, l), Multivector.generator(universe, j, False, m))
    phase = exp_series(form * Fraction(phase_sign, 2))
    return t_sum - wedge(circle_product(t_l, t_m, k), phase)
