"""Brute-force verification in a truncated number basis.

Everything here is deliberately independent of the closed forms in
:mod:`oscprobe.phase_space` and :mod:`oscprobe.states`: Hamiltonians are
assembled as dense matrices, evolution uses spectral decomposition, and the
characteristic function is sampled with matrix exponentials of the
displacement generator.  The analytic route is validated against this one,
never the other way around.

The composite basis is ``|q1> x |q2> x |n1> x |n2>`` with qubit index 0 for
the ground and 1 for the excited state, so the two-qubit computational
labels ``|1>..|4>`` map to flat qubit indices 0..3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .conventions import X_QUADRATURE_SCALE, zeta_from_phase_point

MAX_DENSE_ENTRIES = 10**6

_HERMITICITY_TOL = 1.0e-10


class ResourceLimitError(RuntimeError):
    """Requested dense operator would exceed the configured size budget."""


class TruncationError(RuntimeError):
    """Truncated-basis leakage exceeded the configured tolerance."""


@dataclass(frozen=True)
class FockConfig:
    """Truncation levels per oscillator and the admissible leakage budget."""

    n1: int = 40
    n2: int = 40
    tolerance: float = 1.0e-8

    def __post_init__(self):
        if self.n1 < 2 or self.n2 < 2:
            raise ValueError("need at least two Fock levels per oscillator")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")


# ---------------------------------------------------------------------------
# elementary operators

_SIGMA_Z = np.diag([-1.0, 1.0])  # ground state first
_SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]])


def destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1)


def number_operator(n: int) -> np.ndarray:
    return np.diag(np.arange(n, dtype=float))


def x_operator(n: int, x_scale: float = X_QUADRATURE_SCALE) -> np.ndarray:
    a = destroy(n)
    return x_scale * (a + a.T)


def displacement_matrix(zeta: complex, n: int) -> np.ndarray:
    """Truncated ``exp(zeta a^dag - conj(zeta) a)`` via the matrix exponential."""
    a = destroy(n)
    return scipy.linalg.expm(zeta * a.T - np.conj(zeta) * a)


def _oscillator_hamiltonian(n: int, omega: float, g: float, sign: float, x_scale: float) -> np.ndarray:
    return omega * (number_operator(n) + 0.5 * np.eye(n)) + sign * g * x_operator(n, x_scale)


def build_hamiltonian(params, cfg: FockConfig, x_scale: float = X_QUADRATURE_SCALE) -> np.ndarray:
    """Dense composite Hamiltonian over ``|q1, q2, n1, n2>``.

    Guarded against accidental huge allocations; production-size runs use
    :class:`PairPropagator`, which never materializes the composite matrix.
    """
    dim = 4 * cfg.n1 * cfg.n2
    if dim * dim > MAX_DENSE_ENTRIES:
        raise ResourceLimitError(
            f"dense composite operator would hold {dim * dim} entries "
            f"(limit {MAX_DENSE_ENTRIES}); use PairPropagator instead"
        )
    i2 = np.eye(2)
    io1 = np.eye(cfg.n1)
    io2 = np.eye(cfg.n2)
    h1 = number_operator(cfg.n1) + 0.5 * io1
    h2 = params.omega2 * (number_operator(cfg.n2) + 0.5 * io2)
    x1 = x_operator(cfg.n1, x_scale)
    x2 = x_operator(cfg.n2, x_scale)

    def four(aq1, aq2, ao1, ao2):
        return np.kron(np.kron(aq1, aq2), np.kron(ao1, ao2))

    ham = (
        0.5 * params.delta1 * four(_SIGMA_Z, i2, io1, io2)
        + 0.5 * params.delta2 * four(i2, _SIGMA_Z, io1, io2)
        + four(i2, i2, h1, io2)
        + four(i2, i2, io1, h2)
        + params.g1 * four(_SIGMA_Z, i2, x1, io2)
        + params.g2 * four(i2, _SIGMA_Z, io1, x2)
    )
    return ham


def build_single_hamiltonian(delta: float, g: float, n: int, x_scale: float = X_QUADRATURE_SCALE) -> np.ndarray:
    """Dense single qubit-oscillator dephasing Hamiltonian over ``|q, n>``."""
    if 4 * n * n > MAX_DENSE_ENTRIES:
        raise ResourceLimitError("single-pair operator exceeds the dense size budget")
    iosc = np.eye(n)
    hosc = number_operator(n) + 0.5 * iosc
    return (
        0.5 * delta * np.kron(_SIGMA_Z, iosc)
        + np.kron(np.eye(2), hosc)
        + g * np.kron(_SIGMA_Z, x_operator(n, x_scale))
    )


# ---------------------------------------------------------------------------
# evolution

def evolve(ham: np.ndarray, psi0: np.ndarray, t: float) -> np.ndarray:
    """Propagate ``psi0`` by ``exp(-i H t)`` via spectral decomposition."""
    if not np.all(np.isfinite(psi0)) or not np.all(np.isfinite(ham)):
        raise ValueError("non-finite input")
    evals, evecs = np.linalg.eigh(ham)
    coeff = evecs.conj().T @ np.asarray(psi0, dtype=complex)
    return evecs @ (np.exp(-1j * evals * t) * coeff)


class DenseEvolver:
    """Spectral propagator for a fixed dense Hamiltonian, reused across a grid."""

    def __init__(self, ham: np.ndarray):
        self._evals, self._evecs = np.linalg.eigh(ham)

    def __call__(self, psi0: np.ndarray, t: float) -> np.ndarray:
        coeff = self._evecs.conj().T @ np.asarray(psi0, dtype=complex)
        return self._evecs @ (np.exp(-1j * self._evals * t) * coeff)


class PairPropagator:
    """Exact composite evolution exploiting conservation of both sigma_z.

    Each two-qubit sector evolves under a product of displaced single
    oscillator Hamiltonians, so only four small matrices are diagonalized
    and states stay in the ``(2, 2, n1, n2)`` tensor layout.
    """

    def __init__(self, params, cfg: FockConfig, x_scale: float = X_QUADRATURE_SCALE):
        self.params = params
        self.cfg = cfg
        self._osc = {}
        for sign in (-1.0, 1.0):
            self._osc[(1, sign)] = np.linalg.eigh(
                _oscillator_hamiltonian(cfg.n1, 1.0, params.g1, sign, x_scale)
            )
            self._osc[(2, sign)] = np.linalg.eigh(
                _oscillator_hamiltonian(cfg.n2, params.omega2, params.g2, sign, x_scale)
            )

    def _mode_unitary(self, which: int, sign: float, t: float) -> np.ndarray:
        evals, evecs = self._osc[(which, sign)]
        return (evecs * np.exp(-1j * evals * t)) @ evecs.conj().T

    def propagate(self, psi0: np.ndarray, t: float) -> np.ndarray:
        psi0 = np.asarray(psi0, dtype=complex)
        if psi0.shape != (2, 2, self.cfg.n1, self.cfg.n2):
            raise ValueError("state must have shape (2, 2, n1, n2)")
        out = np.empty_like(psi0)
        for q1 in (0, 1):
            s1 = 1.0 if q1 == 1 else -1.0
            u1 = self._mode_unitary(1, s1, t)
            for q2 in (0, 1):
                s2 = 1.0 if q2 == 1 else -1.0
                u2 = self._mode_unitary(2, s2, t)
                phase = np.exp(-1j * t * 0.5 * (self.params.delta1 * s1 + self.params.delta2 * s2))
                out[q1, q2] = phase * (u1 @ psi0[q1, q2] @ u2.T)
        return out


class SinglePairPropagator:
    """Sector-factorized evolution for the single qubit-oscillator model."""

    def __init__(self, delta: float, g: float, n: int, x_scale: float = X_QUADRATURE_SCALE):
        self.delta = delta
        self.n = n
        self._osc = {
            sign: np.linalg.eigh(_oscillator_hamiltonian(n, 1.0, g, sign, x_scale))
            for sign in (-1.0, 1.0)
        }

    def propagate(self, psi0: np.ndarray, t: float) -> np.ndarray:
        psi0 = np.asarray(psi0, dtype=complex)
        if psi0.shape != (2, self.n):
            raise ValueError("state must have shape (2, n)")
        out = np.empty_like(psi0)
        for q in (0, 1):
            sign = 1.0 if q == 1 else -1.0
            evals, evecs = self._osc[sign]
            phase = np.exp(-1j * t * 0.5 * self.delta * sign)
            out[q] = phase * (evecs @ (np.exp(-1j * evals * t) * (evecs.conj().T @ psi0[q])))
        return out


# ---------------------------------------------------------------------------
# reductions and measures

def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Trace a density matrix over the complement of ``keep``.

    ``dims`` lists the subsystem dimensions in tensor order; ``keep`` is an
    iterable of subsystem indices retained in their original order.  Tracing
    over everything returns a 1x1 matrix holding the trace.
    """
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(int(k) for k in keep))
    if any(k < 0 or k >= len(dims) for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"invalid subsystem subset {keep} for {len(dims)} subsystems")
    total = int(np.prod(dims))
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (total, total):
        raise ValueError(f"density matrix shape {rho.shape} does not match dims {dims}")
    n = len(dims)
    tensor = rho.reshape(dims + dims)
    # contract traced subsystems from the highest index down so the remaining
    # axis numbering stays valid
    for sub in reversed([i for i in range(n) if i not in keep]):
        half = tensor.ndim // 2
        tensor = np.trace(tensor, axis1=sub, axis2=sub + half)
    kept_dim = int(np.prod([dims[i] for i in keep])) if keep else 1
    return tensor.reshape(kept_dim, kept_dim)


def reduced_density(psi: np.ndarray, dims, keep) -> np.ndarray:
    """Reduced density matrix of a pure state without forming the full one."""
    dims = tuple(int(d) for d in dims)
    keep = tuple(sorted(int(k) for k in keep))
    psi = np.asarray(psi, dtype=complex).reshape(dims)
    n = len(dims)
    traced = [i for i in range(n) if i not in keep]
    perm = list(keep) + traced
    block = np.transpose(psi, perm).reshape(
        int(np.prod([dims[i] for i in keep])) if keep else 1, -1
    )
    return block @ block.conj().T


def _validate_density(rho: np.ndarray, tol: float = _HERMITICITY_TOL):
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho).real - 1.0) > tol or abs(np.trace(rho).imag) > tol:
        raise ValueError("density matrix is not normalized")
    evals = np.linalg.eigvalsh(rho)
    if evals.min() < -tol:
        raise ValueError("density matrix is not positive semidefinite")


def wootters_concurrence(rho2q: np.ndarray) -> float:
    """Two-qubit concurrence ``max(0, l1 - l2 - l3 - l4)``.

    The ``l_i`` are the decreasing square roots of the eigenvalues of
    ``rho rho~`` with the spin-flipped ``rho~ = (sy x sy) rho* (sy x sy)``.
    """
    rho2q = np.asarray(rho2q, dtype=complex)
    if rho2q.shape != (4, 4):
        raise ValueError("expected a 4x4 two-qubit density matrix")
    _validate_density(rho2q)
    flip = np.kron(_SIGMA_Y, _SIGMA_Y)
    rho_tilde = flip @ rho2q.conj() @ flip
    evals = np.linalg.eigvals(rho2q @ rho_tilde)
    lam = np.sqrt(np.abs(np.sort(evals.real)))
    return float(max(0.0, lam[3] - lam[2] - lam[1] - lam[0]))


def purity(rho: np.ndarray) -> float:
    return float(np.trace(rho @ rho).real)


def i_concurrence_from_purity(p: float) -> float:
    return math.sqrt(max(0.0, 2.0 * (1.0 - p)))


# ---------------------------------------------------------------------------
# characteristic-function sampling

def charfn_sample(rho_osc: np.ndarray, R, n1: int, n2: int, x_scale: float = X_QUADRATURE_SCALE) -> complex:
    """Sample ``tr[rho K(R)]`` with the Weyl kernel at one phase-space point."""
    R = np.asarray(R, dtype=float)
    d1 = displacement_matrix(complex(zeta_from_phase_point(R[0], R[1], x_scale)), n1)
    d2 = displacement_matrix(complex(zeta_from_phase_point(R[2], R[3], x_scale)), n2)
    rho_osc = np.asarray(rho_osc, dtype=complex)
    kernel = np.kron(d1, d2)
    return complex(np.trace(rho_osc @ kernel))


def charfn_samples_pure(psi_osc: np.ndarray, points: np.ndarray, x_scale: float = X_QUADRATURE_SCALE) -> np.ndarray:
    """Vectorized ``<psi|K(R)|psi>`` over many points for a pure state.

    Displacement matrices are cached per distinct single-mode amplitude so
    grids with product structure stay cheap.
    """
    psi_osc = np.asarray(psi_osc, dtype=complex)
    n1, n2 = psi_osc.shape
    points = np.atleast_2d(np.asarray(points, dtype=float))
    cache1: dict[complex, np.ndarray] = {}
    cache2: dict[complex, np.ndarray] = {}
    out = np.empty(points.shape[0], dtype=complex)
    for idx, (k1, s1, k2, s2) in enumerate(points):
        z1 = complex(zeta_from_phase_point(k1, s1, x_scale))
        z2 = complex(zeta_from_phase_point(k2, s2, x_scale))
        if z1 not in cache1:
            cache1[z1] = displacement_matrix(z1, n1)
        if z2 not in cache2:
            cache2[z2] = displacement_matrix(z2, n2)
        out[idx] = np.vdot(psi_osc, cache1[z1] @ psi_osc @ cache2[z2].T)
    return out


def conditioned_charfn(psi: np.ndarray, i: int, j: int, R, x_scale: float = X_QUADRATURE_SCALE) -> complex:
    """Oscillator characteristic function of the conditioned element <i|rho|j>.

    ``psi`` has shape (2, 2, n1, n2); ``i, j`` use the computational labels
    1..4.
    """
    qi = divmod(i - 1, 2)
    qj = divmod(j - 1, 2)
    slice_i = psi[qi[0], qi[1]]
    slice_j = psi[qj[0], qj[1]]
    R = np.asarray(R, dtype=float)
    d1 = displacement_matrix(complex(zeta_from_phase_point(R[0], R[1], x_scale)), psi.shape[2])
    d2 = displacement_matrix(complex(zeta_from_phase_point(R[2], R[3], x_scale)), psi.shape[3])
    return complex(np.vdot(slice_j, d1 @ slice_i @ d2.T))


# ---------------------------------------------------------------------------
# initial states in the truncated basis

def coherent_vector(alpha_fock: complex, n: int) -> np.ndarray:
    """Truncated coherent state with verified tail mass below 1e-12."""
    k = np.arange(n)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n)))])
    with np.errstate(divide="ignore"):
        log_mag = k * np.log(np.abs(alpha_fock)) if alpha_fock != 0 else np.where(k == 0, 0.0, -np.inf)
    amps = np.exp(log_mag - 0.5 * log_fact - 0.5 * abs(alpha_fock) ** 2 + 0j)
    if alpha_fock != 0:
        amps = amps * np.exp(1j * k * np.angle(alpha_fock))
    tail = 1.0 - float(np.sum(np.abs(amps) ** 2))
    if tail > 1.0e-12:
        raise TruncationError(
            f"coherent-state tail mass {tail:.3e} above 1e-12 at n={n}; increase the truncation"
        )
    return amps / np.linalg.norm(amps)


def fock_vector(level: int, n: int) -> np.ndarray:
    if not 0 <= level < n:
        raise ValueError("Fock level outside the truncated basis")
    v = np.zeros(n, dtype=complex)
    v[level] = 1.0
    return v


def oscillator_pair_state(state, cfg: FockConfig) -> np.ndarray:
    """Pure two-oscillator state of a characteristic-function family, as a
    ``(n1, n2)`` tensor in the truncated basis."""
    from . import states as st

    scale = X_QUADRATURE_SCALE
    if isinstance(state, st.SeparableGaussianState):
        v1 = coherent_vector(complex(state.x_o1, state.p_o1) * scale, cfg.n1)
        v2 = coherent_vector(complex(state.x_o2, state.p_o2) * scale, cfg.n2)
        return np.outer(v1, v2)
    if isinstance(state, st.EntangledCoherentState):
        psi = complex(state.c1) * np.outer(
            coherent_vector(complex(state.alpha1) * scale, cfg.n1),
            coherent_vector(complex(state.beta2) * scale, cfg.n2),
        ) + complex(state.c2) * np.outer(
            coherent_vector(complex(state.beta1) * scale, cfg.n1),
            coherent_vector(complex(state.alpha2) * scale, cfg.n2),
        )
        return psi / np.linalg.norm(psi)
    if isinstance(state, st.SeparableNumberState):
        v1 = state.alpha1 * fock_vector(state.n1, cfg.n1) + state.beta1 * fock_vector(state.m1, cfg.n1)
        v2 = state.alpha2 * fock_vector(state.n2, cfg.n2) + state.beta2 * fock_vector(state.m2, cfg.n2)
        return np.outer(v1, v2)
    if isinstance(state, st.EntangledNumberState):
        psi = state.p1 * np.outer(
            fock_vector(state.n1, cfg.n1), fock_vector(state.m2, cfg.n2)
        ) + state.p2 * np.outer(fock_vector(state.m1, cfg.n1), fock_vector(state.n2, cfg.n2))
        return psi / np.linalg.norm(psi)
    raise ValueError(f"no Fock-basis constructor for state family {type(state).__name__}")


def qubit_vector(a: complex, b: complex) -> np.ndarray:
    """Single-qubit amplitudes as ``(g, e)`` components."""
    v = np.array([b, a], dtype=complex)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("qubit amplitudes must not both vanish")
    return v / norm


_BELL_PSI_PLUS = np.zeros((2, 2), dtype=complex)
_BELL_PSI_PLUS[1, 0] = 1.0 / math.sqrt(2.0)  # |e1 g2>
_BELL_PSI_PLUS[0, 1] = 1.0 / math.sqrt(2.0)  # |g1 e2>


def leakage(psi: np.ndarray) -> tuple[float, float]:
    """Population of the top two levels of each oscillator."""
    pop1 = np.sum(np.abs(psi) ** 2, axis=(0, 1, 3))
    pop2 = np.sum(np.abs(psi) ** 2, axis=(0, 1, 2))
    return float(pop1[-2:].sum()), float(pop2[-2:].sum())


def check_leakage(psi: np.ndarray, cfg: FockConfig):
    l1, l2 = leakage(psi)
    if max(l1, l2) > cfg.tolerance:
        raise TruncationError(
            f"truncation leakage {max(l1, l2):.3e} exceeds tolerance {cfg.tolerance:.1e}; "
            f"retry with n1={2 * cfg.n1}, n2={2 * cfg.n2}"
        )


# ---------------------------------------------------------------------------
# probe curves

def bell_probe_curves(params, state, ts, cfg: FockConfig) -> dict:
    """Concurrence, I-concurrence and the |2><3| coherence of the Bell copy."""
    psi_osc = oscillator_pair_state(state, cfg)
    psi0 = np.einsum("qr,nm->qrnm", _BELL_PSI_PLUS, psi_osc)
    prop = PairPropagator(params, cfg)
    nts = len(ts)
    out = {
        "C": np.empty(nts),
        "I": np.empty(nts),
        "coherence": np.empty(nts, dtype=complex),
        "offblock": np.empty(nts),
    }
    for idx, t in enumerate(ts):
        psi = prop.propagate(psi0, float(t))
        check_leakage(psi, cfg)
        rho = reduced_density(psi, (2, 2, cfg.n1, cfg.n2), keep=(0, 1))
        out["C"][idx] = wootters_concurrence(rho)
        out["I"][idx] = i_concurrence_from_purity(purity(rho))
        out["coherence"][idx] = rho[1, 2]
        mask = np.ones((4, 4), dtype=bool)
        mask[1:3, 1:3] = False
        out["offblock"][idx] = float(np.max(np.abs(rho[mask])))
    return out


def fidelity_probe_curves(prep_amps, params, state, ts, cfg: FockConfig) -> dict:
    """Raw squared qubit coherences of the unprojected copy.

    ``prep_amps`` is ``(a1, b1, a2, b2)`` with ``a`` the excited amplitude.
    """
    a1, b1, a2, b2 = (complex(v) for v in prep_amps)
    psi_osc = oscillator_pair_state(state, cfg)
    psi0 = np.einsum("q,r,nm->qrnm", qubit_vector(a1, b1), qubit_vector(a2, b2), psi_osc)
    prop = PairPropagator(params, cfg)
    nts = len(ts)
    out = {
        "F1_raw": np.empty(nts),
        "F2_raw": np.empty(nts),
        "coh1": np.empty(nts, dtype=complex),
        "coh2": np.empty(nts, dtype=complex),
    }
    for idx, t in enumerate(ts):
        psi = prop.propagate(psi0, float(t))
        check_leakage(psi, cfg)
        rho1 = reduced_density(psi, (2, 2, cfg.n1, cfg.n2), keep=(0,))
        rho2 = reduced_density(psi, (2, 2, cfg.n1, cfg.n2), keep=(1,))
        out["coh1"][idx] = rho1[1, 0]  # <e|rho|g>
        out["coh2"][idx] = rho2[1, 0]
        out["F1_raw"][idx] = abs(rho1[1, 0]) ** 2
        out["F2_raw"][idx] = abs(rho2[1, 0]) ** 2
    return out


def single_model_coherence(delta, g, qubit_amps, mode_vector, ts, n,
                           x_scale: float = X_QUADRATURE_SCALE) -> np.ndarray:
    """Complex qubit coherence ``<e|rho_q(t)|g>`` of the single dephasing model.

    ``mode_vector`` is the oscillator state in the truncated basis.
    """
    a, b = (complex(v) for v in qubit_amps)
    psi0 = np.einsum("q,n->qn", qubit_vector(a, b), np.asarray(mode_vector, dtype=complex))
    prop = SinglePairPropagator(delta, g, n, x_scale)
    out = np.empty(len(ts), dtype=complex)
    for idx, t in enumerate(ts):
        psi = prop.propagate(psi0, float(t))
        out[idx] = np.sum(psi[1] * np.conj(psi[0]))
    return out
