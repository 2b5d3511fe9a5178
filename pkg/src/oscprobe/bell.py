"""First protocol copy: Bell projection, concurrence and I-concurrence.

Projecting the two qubits onto the Bell state ``(|e1 g2> + |g1 e2>)/sqrt(2)``
leaves the composite state supported on the central 2x2 block of the
computational basis with an X-shaped two-qubit reduction whose diagonal
entries stay exactly 1/2.  The entire probe therefore reduces to a single
complex coherence function of time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .conventions import DISPLACEMENT_PREFACTOR
from .phase_space import ModelParams, rotated_displacement
from .states import CharFnState


class ZeroProbabilityError(ValueError):
    """The Bell projection annihilates the prepared qubit state."""


@dataclass(frozen=True)
class QubitPreparation:
    """Product preparation ``(a_i |e_i> + b_i |g_i>)`` of the two qubits."""

    a1: complex
    b1: complex
    a2: complex
    b2: complex

    def __post_init__(self):
        for a, b, label in ((self.a1, self.b1, "1"), (self.a2, self.b2, "2")):
            if abs(abs(a) ** 2 + abs(b) ** 2 - 1.0) > 1.0e-12:
                raise ValueError(f"qubit {label} amplitudes must be normalized")

    @classmethod
    def maximal(cls) -> "QubitPreparation":
        r = 1.0 / math.sqrt(2.0)
        return cls(r, r, r, r)

    @property
    def basis_amplitudes(self) -> np.ndarray:
        """Composite amplitudes over ``|1> = |g1 g2>`` ... ``|4> = |e1 e2>``."""
        return np.array(
            [
                self.b1 * self.b2,
                self.b1 * self.a2,
                self.a1 * self.b2,
                self.a1 * self.a2,
            ],
            dtype=complex,
        )

    def coefficient_matrix(self) -> np.ndarray:
        """Rank-one coefficient matrix ``c_ij = psi_i conj(psi_j)``."""
        psi = self.basis_amplitudes
        return np.outer(psi, psi.conj())


@dataclass(frozen=True)
class BellProbe:
    """Bell-projected copy of the composite system.

    After the projection the renormalized oscillator profile is ``w0 / 2``
    regardless of the qubit preparation, so only the projection probability
    remembers the amplitudes.
    """

    prep: QubitPreparation
    state: CharFnState
    params: ModelParams
    kappa: float = DISPLACEMENT_PREFACTOR

    def __post_init__(self):
        if self.projection_probability < 1.0e-12:
            raise ZeroProbabilityError(
                "preparation is orthogonal to the Bell state; projection has zero probability"
            )

    @property
    def projection_probability(self) -> float:
        psi = self.prep.basis_amplitudes
        return float(abs(psi[1] + psi[2]) ** 2 / 2.0)

    @property
    def amplitude(self) -> float:
        """Normalization of the post-measurement coherence profile."""
        return 0.5

    def _echo_point(self, t):
        # argument of w0 in the |2><3| coherence: -kappa Phi(-t) xi_{-g1, g2}(t)
        return -self.kappa * rotated_displacement(
            -self.params.g1, self.params.g2, t, self.params
        )

    def coherence(self, t):
        """Complex off-diagonal element ``<2|rho_q1q2(t)|3>``; vectorized in t."""
        point = self._echo_point(t)
        phase = np.exp(1j * self.params.delta12 * np.asarray(t, dtype=float))
        return self.amplitude * self.state(point) * phase

    def concurrence(self, t):
        """Two-qubit concurrence ``2 |f(t)|`` of the X-shaped reduction."""
        return 2.0 * np.abs(self.coherence(t))

    def i_concurrence(self, t):
        """Bipartition entanglement ``sqrt(1 - 4|f(t)|^2)`` between the qubit
        pair and the oscillator pair."""
        f2 = np.abs(self.coherence(t)) ** 2
        return np.sqrt(np.clip(1.0 - 4.0 * f2, 0.0, None))


def bell_project(prep: QubitPreparation, state: CharFnState, params: ModelParams,
                 kappa: float = DISPLACEMENT_PREFACTOR) -> BellProbe:
    """Apply the Bell projection and return the renormalized probe."""
    return BellProbe(prep, state, params, kappa)
