"""Characteristic-function evaluators for the initial oscillator states.

Four two-oscillator families are supported: separable Gaussian (coherent)
states, entangled coherent states, separable superpositions of number states
and entangled number states.  Every evaluator is exact for the pure state it
represents: the number families are assembled from closed-form displacement
matrix elements ``<n|D(zeta)|m>`` rather than from the diagonal-only Laguerre
sums, so interference terms are included and ``w(0) = 1`` holds by
construction.  Literal diagonal-only variants are kept on the number
families for side-by-side comparison.

Complex coherent amplitudes follow the centroid labeling
``alpha = x_alpha + i p_alpha``; the corresponding Fock-space amplitudeis
``alpha / sqrt(2)`` in the canonical quadrature convention.

Evaluators are immutable after construction and vectorized: calling one with
an array of shape ``(..., 4)`` (or ``(..., 2)`` for the single-mode states)
returns complex amplitudes of shape ``(...)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .conventions import X_QUADRATURE_SCALE, zeta_from_phase_point

_FACTORIAL_TABLE = np.array([math.factorial(n) for n in range(171)], dtype=float)

_NORMALIZATION_TOL = 1.0e-12


def sqrt_factorial_ratio(m: int, n: int) -> float:
    """``sqrt(m! / n!)`` from the factorial table, log-gamma beyond it."""
    if m < _FACTORIAL_TABLE.size and n < _FACTORIAL_TABLE.size:
        return math.sqrt(_FACTORIAL_TABLE[m] / _FACTORIAL_TABLE[n])
    return math.exp(0.5 * (math.lgamma(m + 1) - math.lgamma(n + 1)))


def laguerre(n: int, k: int, x):
    """Associated Laguerre polynomial ``L_n^(k)(x)`` by three-term recurrence.

    ``L_n^(0)`` is the ordinary Laguerre polynomial.  Requires ``n >= 0`` and
    ``n + k >= 0``; vectorized over ``x``.
    """
    if n < 0:
        raise ValueError("polynomial degree n must be non-negative")
    if n + k < 0:
        raise ValueError("order requires n + k >= 0")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev
    cur = 1.0 + k - x
    for j in range(2, n + 1):
        prev, cur = cur, ((2.0 * j - 1.0 + k - x) * cur - (j - 1.0 + k) * prev) / j
    return cur


def displaced_number_element(n: int, m: int, zeta):
    """Displacement matrix element ``<n|D(zeta)|m>``.

    For ``n >= m`` this is
    ``sqrt(m!/n!) zeta^(n-m) exp(-|zeta|^2/2) L_m^(n-m)(|zeta|^2)``; the
    opposite ordering follows from ``<n|D(zeta)|m> = conj(<m|D(-zeta)|n>)``.
    Vectorized over ``zeta``.
    """
    if n < 0 or m < 0:
        raise ValueError("Fock indices must be non-negative")
    zeta = np.asarray(zeta, dtype=complex)
    if n < m:
        return np.conj(displaced_number_element(m, n, -zeta))
    a2 = np.abs(zeta) ** 2
    return (
        sqrt_factorial_ratio(m, n)
        * zeta ** (n - m)
        * np.exp(-0.5 * a2)
        * laguerre(m, n - m, a2)
    )


def coherent_displacement_element(beta, alpha, zeta):
    """``<beta|D(zeta)|alpha>`` for coherent states with Fock amplitudes."""
    beta = np.asarray(beta, dtype=complex)
    alpha = np.asarray(alpha, dtype=complex)
    zeta = np.asarray(zeta, dtype=complex)
    exponent = (
        np.conj(beta) * alpha
        + np.conj(beta) * zeta
        - alpha * np.conj(zeta)
        - 0.5 * (np.abs(alpha) ** 2 + np.abs(beta) ** 2 + np.abs(zeta) ** 2)
    )
    return np.exp(exponent)


def _zetas(R):
    R = np.asarray(R, dtype=float)
    if R.shape[-1] != 4:
        raise ValueError("expected phase-space points of shape (..., 4)")
    z1 = zeta_from_phase_point(R[..., 0], R[..., 1])
    z2 = zeta_from_phase_point(R[..., 2], R[..., 3])
    return z1, z2


class CharFnState:
    """Base for two-oscillator characteristic functions ``w(R)``.

    Subclasses implement ``_evaluate`` on points of shape ``(..., 4)`` with
    ``R = (k1, s1, k2, s2)``.  Every instance satisfies ``w(0) = 1``,
    ``w(-R) = conj(w(R))`` and ``|w(R)| <= 1``.
    """

    family = "base"
    separable = False

    def __call__(self, R):
        return self._evaluate(np.asarray(R, dtype=float))

    def _evaluate(self, R):  # pragma: no cover - abstract
        raise NotImplementedError


def _as_unit_pair(u, v, what: str):
    norm2 = abs(u) ** 2 + abs(v) ** 2
    if norm2 <= 0.0:
        raise ValueError(f"{what} weights must not both vanish")
    if abs(norm2 - 1.0) > _NORMALIZATION_TOL:
        warnings.warn(f"{what} weights renormalized (|.|^2 sum was {norm2:.6g})", stacklevel=3)
        scale = 1.0 / math.sqrt(norm2)
        return u * scale, v * scale, True
    return u, v, False


@dataclass(frozen=True)
class SeparableGaussianState(CharFnState):
    """Product of two coherent states with centroids ``(x_oi, p_oi)``.

    ``w(R) = exp(i R . x_o - R.R / 4)`` with the covariance fixed to the
    coherent-state value.
    """

    x_o1: float = 0.0
    p_o1: float = 0.0
    x_o2: float = 0.0
    p_o2: float = 0.0

    family = "separable_gaussian"
    separable = True

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x_o1, self.p_o1, self.x_o2, self.p_o2)):
            raise ValueError("centroids must be finite")

    @property
    def centroid(self) -> np.ndarray:
        return np.array([self.x_o1, self.p_o1, self.x_o2, self.p_o2])

    def _evaluate(self, R):
        quad = np.einsum("...i,...i->...", R, R)
        return np.exp(1j * (R @ self.centroid) - 0.25 * quad)


@dataclass(frozen=True)
class EntangledCoherentState(CharFnState):
    """Superposition ``c1 |alpha1, beta2> + c2 |beta1, alpha2>``.

    The branch overlaps enter the normalization exactly, so ``w(0) = 1``
    holds for any amplitudes.  Coherent labels use the centroid convention
    ``alpha = x_alpha + i p_alpha``.
    """

    alpha1: complex
    beta1: complex
    alpha2: complex
    beta2: complex
    c1: complex = 1.0 / math.sqrt(2.0)
    c2: complex = 1.0 / math.sqrt(2.0)

    family = "entangled_coherent"
    separable = False

    def __post_init__(self):
        norm = self._norm_squared()
        if norm <= _NORMALIZATION_TOL:
            raise ValueError("entangled coherent state has (numerically) zero norm")

    def _fock_branches(self):
        s = X_QUADRATURE_SCALE
        a1, b1 = complex(self.alpha1) * s, complex(self.beta1) * s
        a2, b2 = complex(self.alpha2) * s, complex(self.beta2) * s
        return ((a1, b2), (b1, a2))

    def _norm_squared(self) -> float:
        branches = self._fock_branches()
        weights = (complex(self.c1), complex(self.c2))
        total = 0.0 + 0.0j
        for u, (u1, u2) in zip(weights, branches):
            for v, (v1, v2) in zip(weights, branches):
                total += (
                    u
                    * np.conj(v)
                    * coherent_displacement_element(v1, u1, 0.0)
                    * coherent_displacement_element(v2, u2, 0.0)
                )
        return float(total.real)

    def _evaluate(self, R):
        z1, z2 = _zetas(R)
        branches = self._fock_branches()
        weights = (complex(self.c1), complex(self.c2))
        total = np.zeros(z1.shape, dtype=complex)
        for u, (u1, u2) in zip(weights, branches):
            for v, (v1, v2) in zip(weights, branches):
                total = total + (
                    u
                    * np.conj(v)
                    * coherent_displacement_element(v1, u1, z1)
                    * coherent_displacement_element(v2, u2, z2)
                )
        return total / self._norm_squared()


def _number_mode_charfn(n, m, amp_n, amp_m, zeta):
    return (
        abs(amp_n) ** 2 * displaced_number_element(n, n, zeta)
        + abs(amp_m) ** 2 * displaced_number_element(m, m, zeta)
        + amp_n * np.conj(amp_m) * displaced_number_element(m, n, zeta)
        + np.conj(amp_n) * amp_m * displaced_number_element(n, m, zeta)
    )


@dataclass(frozen=True)
class SeparableNumberState(CharFnState):
    """Product of per-oscillator superpositions ``alpha|n> + beta|m>``."""

    n1: int
    m1: int
    n2: int
    m2: int
    alpha1: complex = 1.0 / math.sqrt(2.0)
    beta1: complex = 1.0 / math.sqrt(2.0)
    alpha2: complex = 1.0 / math.sqrt(2.0)
    beta2: complex = 1.0 / math.sqrt(2.0)
    was_renormalized: bool = field(default=False, compare=False)

    family = "separable_number"
    separable = True

    def __post_init__(self):
        for n, m in ((self.n1, self.m1), (self.n2, self.m2)):
            if n < 0 or m < 0:
                raise ValueError("number-state levels must be non-negative")
            if n == m:
                raise ValueError("superposed levels must differ (n_i != m_i)")
        a1, b1, renorm1 = _as_unit_pair(complex(self.alpha1), complex(self.beta1), "oscillator-1")
        a2, b2, renorm2 = _as_unit_pair(complex(self.alpha2), complex(self.beta2), "oscillator-2")
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "beta1", b1)
        object.__setattr__(self, "alpha2", a2)
        object.__setattr__(self, "beta2", b2)
        object.__setattr__(self, "was_renormalized", renorm1 or renorm2)

    def _evaluate(self, R):
        z1, z2 = _zetas(R)
        w1 = _number_mode_charfn(self.n1, self.m1, self.alpha1, self.beta1, z1)
        w2 = _number_mode_charfn(self.n2, self.m2, self.alpha2, self.beta2, z2)
        return w1 * w2

    def literal_value(self, R):
        """Diagonal-only Laguerre form, with the interference terms dropped
        and the printed amplitude (not probability) weights kept."""
        R = np.asarray(R, dtype=float)
        r1sq = R[..., 0] ** 2 + R[..., 1] ** 2
        r2sq = R[..., 2] ** 2 + R[..., 3] ** 2
        w1 = self.alpha1 * laguerre(self.n1, 0, r1sq / 2.0) + self.beta1 * laguerre(
            self.m1, 0, r1sq / 2.0
        )
        w2 = self.alpha2 * laguerre(self.n2, 0, r2sq / 2.0) + self.beta2 * laguerre(
            self.m2, 0, r2sq / 2.0
        )
        return np.exp(-0.25 * (r1sq + r2sq)) * w1 * w2


@dataclass(frozen=True)
class EntangledNumberState(CharFnState):
    """Single-excitation-style entangled state ``p1|n1, m2> + p2|m1, n2>``."""

    n1: int
    m1: int
    n2: int
    m2: int
    p1: complex = 1.0 / math.sqrt(2.0)
    p2: complex = 1.0 / math.sqrt(2.0)
    was_renormalized: bool = field(default=False, compare=False)

    family = "entangled_number"
    separable = False

    def __post_init__(self):
        for n, m in ((self.n1, self.m1), (self.n2, self.m2)):
            if n < 0 or m < 0:
                raise ValueError("number-state levels must be non-negative")
            if n == m:
                raise ValueError("entangled branches must be orthogonal (n_i != m_i)")
        p1, p2, renorm = _as_unit_pair(complex(self.p1), complex(self.p2), "branch")
        object.__setattr__(self, "p1", p1)
        object.__setattr__(self, "p2", p2)
        object.__setattr__(self, "was_renormalized", renorm)

    def _evaluate(self, R):
        z1, z2 = _zetas(R)
        p1, p2 = self.p1, self.p2
        diag = abs(p1) ** 2 * displaced_number_element(self.n1, self.n1, z1) * displaced_number_element(
            self.m2, self.m2, z2
        ) + abs(p2) ** 2 * displaced_number_element(self.m1, self.m1, z1) * displaced_number_element(
            self.n2, self.n2, z2
        )
        cross = p1 * np.conj(p2) * displaced_number_element(self.m1, self.n1, z1) * displaced_number_element(
            self.n2, self.m2, z2
        ) + np.conj(p1) * p2 * displaced_number_element(self.n1, self.m1, z1) * displaced_number_element(
            self.m2, self.n2, z2
        )
        return diag + cross

    def derived_cross_coefficient(self) -> float:
        """Exact value of the interference prefactor left open in the
        diagonal-Laguerre presentation, valid for n_i > m_i orderings."""
        d1 = self.n1 - self.m1
        d2 = self.n2 - self.m2
        return (
            sqrt_factorial_ratio(self.m1, self.n1)
            * sqrt_factorial_ratio(self.m2, self.n2)
            * math.sqrt(2.0) ** (d1 + d2)
        )

    def literal_value(self, R, cross_coefficient: float | None = None):
        """Literal widetext form with an explicit interference prefactor.

        Only defined for ``n1 > m1`` and ``n2 > m2``; the default prefactor
        is the derived exact one.
        """
        if self.n1 <= self.m1 or self.n2 <= self.m2:
            raise ValueError("literal form requires n_i > m_i")
        if cross_coefficient is None:
            cross_coefficient = self.derived_cross_coefficient()
        R = np.asarray(R, dtype=float)
        k1, s1, k2, s2 = R[..., 0], R[..., 1], R[..., 2], R[..., 3]
        r1sq = k1**2 + s1**2
        r2sq = k2**2 + s2**2
        d1 = self.n1 - self.m1
        d2 = self.n2 - self.m2
        p1, p2 = self.p1, self.p2
        diag = abs(p1) ** 2 * laguerre(self.n1, 0, r1sq / 2) * laguerre(self.m2, 0, r2sq / 2) + abs(
            p2
        ) ** 2 * laguerre(self.m1, 0, r1sq / 2) * laguerre(self.n2, 0, r2sq / 2)
        lag_cross = laguerre(self.m1, d1, r1sq / 2) * laguerre(self.m2, d2, r2sq / 2)
        cross = cross_coefficient * (
            p1 * np.conj(p2) * ((1j * k1 + s1) / 2) ** d1 * ((1j * k2 - s2) / 2) ** d2
            + np.conj(p1) * p2 * ((1j * k1 - s1) / 2) ** d1 * ((1j * k2 + s2) / 2) ** d2
        ) * lag_cross
        return np.exp(-0.25 * (r1sq + r2sq)) * (diag + cross)


_FAMILIES = {
    "separable_gaussian": SeparableGaussianState,
    "entangled_coherent": EntangledCoherentState,
    "separable_number": SeparableNumberState,
    "entangled_number": EntangledNumberState,
}


def make_state(family: str, **params) -> CharFnState:
    """Construct a characteristic-function evaluator by family tag."""
    try:
        cls = _FAMILIES[family]
    except KeyError:
        raise ValueError(
            f"unknown state family {family!r}; expected one of {sorted(_FAMILIES)}"
        ) from None
    return cls(**params)


class SingleModeState:
    """Base for one-oscillator characteristic functions on ``r = (k, s)``."""

    def __call__(self, r):
        return self._evaluate(np.asarray(r, dtype=float))

    def _evaluate(self, r):  # pragma: no cover - abstract
        raise NotImplementedError


@dataclass(frozen=True)
class GaussianMode(SingleModeState):
    """Coherent single-mode state with centroid ``(x_o, p_o)``."""

    x_o: float = 0.0
    p_o: float = 0.0

    @property
    def is_vacuum(self) -> bool:
        return self.x_o == 0.0 and self.p_o == 0.0

    def _evaluate(self, r):
        quad = r[..., 0] ** 2 + r[..., 1] ** 2
        return np.exp(1j * (r[..., 0] * self.x_o + r[..., 1] * self.p_o) - 0.25 * quad)


@dataclass(frozen=True)
class NumberMode(SingleModeState):
    """Single-mode superposition ``alpha|n> + beta|m>`` with ``n != m``."""

    n: int
    m: int
    alpha: complex = 1.0 / math.sqrt(2.0)
    beta: complex = 1.0 / math.sqrt(2.0)

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError("number-state levels must be non-negative")
        if self.n == self.m:
            raise ValueError("superposed levels must differ")
        a, b, _ = _as_unit_pair(complex(self.alpha), complex(self.beta), "mode")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    def _evaluate(self, r):
        zeta = zeta_from_phase_point(r[..., 0], r[..., 1])
        return _number_mode_charfn(self.n, self.m, self.alpha, self.beta, zeta)


def vacuum_mode() -> GaussianMode:
    return GaussianMode(0.0, 0.0)
