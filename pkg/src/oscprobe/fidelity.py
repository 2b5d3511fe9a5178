"""Second protocol copy: fidelity amplitudes and the single dephasing model.

The unprojected copy keeps the qubits in their product superpositions; the
dephasing coupling imprints each oscillator's displaced evolution on the
corresponding qubit coherence.  The squared coherence magnitudes are the
fidelity amplitudes F_q1, F_q2; for factorizable oscillator states the
concurrence of the Bell copy equals ``sqrt(F_q1 F_q2)`` identically, and the
residual between the two sides is the entanglement witness.

The single qubit-oscillator model mirrors one pair on its own: its
normalized echo (coherence magnitude) decays as ``exp(-|d(t)|^2)`` where
``d(t)`` is the separation of the two counter-moving wave packets the
oscillator splits into, exposed here through Wigner-function snapshots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bell import BellProbe, QubitPreparation
from .conventions import DISPLACEMENT_PREFACTOR
from .phase_space import ModelParams, rotated_displacement
from .states import CharFnState, GaussianMode, SingleModeState, vacuum_mode


class UndefinedNormalizationError(ValueError):
    """Normalized fidelity requested for a preparation with zero coherence."""


class UnsupportedStateError(ValueError):
    """Closed form only available for the vacuum oscillator state."""


@dataclass(frozen=True)
class FidelityProbe:
    """Unprojected copy tracking both qubit coherences."""

    prep: QubitPreparation
    state: CharFnState
    params: ModelParams
    kappa: float = DISPLACEMENT_PREFACTOR

    @property
    def a_1(self) -> float:
        """Coherence normalization ``|c13 + c24| = |a1 b1|``."""
        return float(abs(self.prep.a1) * abs(self.prep.b1))

    @property
    def a_2(self) -> float:
        """Coherence normalization ``|c12 + c34| = |a2 b2|``."""
        return float(abs(self.prep.a2) * abs(self.prep.b2))

    def _echo_point(self, which: int, t):
        if which == 1:
            return -self.kappa * rotated_displacement(-self.params.g1, 0.0, t, self.params)
        if which == 2:
            return -self.kappa * rotated_displacement(0.0, -self.params.g2, t, self.params)
        raise ValueError("which must be 1 or 2")

    def coherence(self, which: int, t):
        """Raw complex qubit coherence ``<e_i| rho_qi(t) |g_i>``."""
        point = self._echo_point(which, t)
        psi = self.prep.basis_amplitudes
        if which == 1:
            weight = psi[0] * np.conj(psi[2]) + psi[1] * np.conj(psi[3])
            delta = self.params.delta1
        else:
            weight = psi[0] * np.conj(psi[1]) + psi[2] * np.conj(psi[3])
            delta = self.params.delta2
        # weight = c13 + c24 (resp. c12 + c34); the propagated upper-triangle
        # sum is conjugated to give the <e|rho|g> element
        upper = weight * self.state(point) * np.exp(1j * delta * np.asarray(t, dtype=float))
        return np.conj(upper)

    def fidelity(self, which: int, t, normalized: bool = True):
        """Fidelity amplitude ``F_qi(t)``, the squared coherence magnitude.

        Raw mode returns ``A_i^2 |w0(..)|^2``; normalized mode divides by
        ``A_i^2`` so that ``F_qi(0) = 1``.
        """
        amp = np.abs(self.state(self._echo_point(which, t))) ** 2
        if normalized:
            a_i = self.a_1 if which == 1 else self.a_2
            if a_i < 1.0e-15:
                raise UndefinedNormalizationError(
                    f"qubit {which} preparation has zero coherence; normalized fidelity undefined"
                )
            return amp
        a_i = self.a_1 if which == 1 else self.a_2
        return a_i**2 * amp


def match_residual(bell: BellProbe, fid: FidelityProbe, t):
    """Witness ``|C(t) - sqrt(F_q1 F_q2)|`` with normalized amplitudes.

    Vanishes identically for factorizable oscillator states; both probes
    must share the model parameters and the oscillator state.
    """
    if bell.params != fid.params:
        raise ValueError("probes use different model parameters")
    if bell.state != fid.state:
        raise ValueError("probes use different oscillator states")
    c = bell.concurrence(t)
    f1 = fid.fidelity(1, t, normalized=True)
    f2 = fid.fidelity(2, t, normalized=True)
    return np.abs(c - np.sqrt(f1 * f2))


@dataclass(frozen=True)
class SingleDephasingModel:
    """One qubit dephasing-coupled to one oscillator (frequency fixed to 1).

    ``excited_population`` and ``coherence`` are the initial qubit density
    matrix entries a and c; the oscillator starts in ``mode``.
    """

    delta: float = 0.0
    g: float = 1.0
    excited_population: float = 0.5
    coherence: complex = 0.5
    mode: SingleModeState = field(default_factory=vacuum_mode)
    kappa: float = DISPLACEMENT_PREFACTOR

    def __post_init__(self):
        a = self.excited_population
        if not 0.0 <= a <= 1.0:
            raise ValueError("excited population must lie in [0, 1]")
        if abs(self.coherence) ** 2 > a * (1.0 - a) + 1.0e-12:
            raise ValueError("coherence violates positivity of the qubit state")

    def _echo_point(self, t):
        # <e|rho|g> propagates with the +g displacement branch, so the echo
        # argument is -kappa * Phi(-t) xi_{+g}(t)
        full = rotated_displacement(-self.g, 0.0, t, ModelParams(omega2=1.0))
        return self.kappa * full[..., 0:2]

    def qubit_coherence(self, t):
        """Complex coherence ``f_q(t) = <e|rho_q(t)|g>``; vectorized in t."""
        phase = np.exp(-1j * self.delta * np.asarray(t, dtype=float))
        return self.coherence * self.mode(self._echo_point(t)) * phase

    def echo(self, t, normalized: bool = True):
        """Fidelity amplitude of the dephasing dynamics, ``|f_q(t)|``.

        The normalized echo divides out the initial coherence; for the
        vacuum it equals ``exp(-4 g^2 sin^2(t/2))``.
        """
        mag = np.abs(self.qubit_coherence(t))
        if not normalized:
            return mag
        c = abs(self.coherence)
        if c < 1.0e-15:
            raise UndefinedNormalizationError("zero initial coherence; normalized echo undefined")
        return mag / c

    def i_concurrence(self, t):
        """Qubit-oscillator entanglement ``sqrt(1 - 4 |f_q(t)|^2)``.

        Matches the purity-based measure for the pure maximal-superposition
        preparation (a = 1/2, |c| = 1/2).
        """
        f2 = np.abs(self.qubit_coherence(t)) ** 2
        return np.sqrt(np.clip(1.0 - 4.0 * f2, 0.0, None))

    def packet_separation(self, t):
        """Displacement vector ``d(t)`` of the excited-conditioned packet."""
        theta = np.asarray(t, dtype=float)
        return np.stack(
            [-self.g * (1.0 - np.cos(theta)), -self.g * np.sin(theta)], axis=-1
        )


@dataclass(frozen=True)
class WignerSnapshot:
    """Dense Wigner-function grid of the oscillator at one time."""

    t: float
    x: np.ndarray
    p: np.ndarray
    values: np.ndarray
    separation: np.ndarray

    @property
    def grid_mass(self) -> float:
        dx = float(self.x[1] - self.x[0])
        dp = float(self.p[1] - self.p[0])
        return float(np.sum(self.values) * dx * dp)

    def to_csv(self, path):
        from .scenario import _format_float

        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("x,p,W\n")
            for i, xi in enumerate(self.x):
                for j, pj in enumerate(self.p):
                    fh.write(
                        f"{_format_float(xi)},{_format_float(pj)},{_format_float(self.values[i, j])}\n"
                    )


def wigner_snapshot(model: SingleDephasingModel, t: float, x_min: float = -6.0,
                    x_max: float = 6.0, step: float = 0.05) -> WignerSnapshot:
    """Closed-form Wigner function of the oscillator at time ``t``.

    Valid for the vacuum initial state only: the oscillator is then an
    a-weighted pair of unit-covariance Gaussians at ``+d(t)`` and ``-d(t)``.
    """
    if not (isinstance(model.mode, GaussianMode) and model.mode.is_vacuum):
        raise UnsupportedStateError(
            "closed-form Wigner snapshots require the vacuum oscillator state"
        )
    axis = np.arange(x_min, x_max + 0.5 * step, step)
    xg, pg = np.meshgrid(axis, axis, indexing="ij")
    d = model.packet_separation(float(t))
    a = model.excited_population
    gauss_e = np.exp(-((xg - d[0]) ** 2 + (pg - d[1]) ** 2))
    gauss_g = np.exp(-((xg + d[0]) ** 2 + (pg + d[1]) ** 2))
    values = (a * gauss_e + (1.0 - a) * gauss_g) / math.pi
    return WignerSnapshot(t=float(t), x=axis, p=axis, values=values, separation=d)
