"""Sign and scale conventions shared by the analytic and Fock-space routes.

Two constants are not fixed by dimensional analysis alone and are pinned by
the echo calibration in :mod:`oscprobe.calibration`:

``DISPLACEMENT_PREFACTOR``
    The factor multiplying the time-dependent displacement in every
    conditioned propagation rule (the argument shift of the initial
    characteristic function).

``X_QUADRATURE_SCALE``
    The scale ``s`` in ``x = s * (a + a^dag)``.  Its canonical companion
    ``p = (a - a^dag) / (2 i s)`` keeps ``[x, p] = i``.

The values below are the unique candidate pair for which the closed-form
normalized echo of the single dephasing model equals
``exp(-4 g^2 sin^2(t/2))`` on both the analytic and the brute-force route.
Run ``oscprobe calibrate`` to reproduce the selection.
"""

import math

import numpy as np

DISPLACEMENT_PREFACTOR = 2.0
X_QUADRATURE_SCALE = 1.0 / math.sqrt(2.0)


def zeta_from_phase_point(k, s, x_scale: float = X_QUADRATURE_SCALE):
    """Displacement amplitude such that ``exp(i(k x + s p)) = D(zeta)``.

    With ``x = x_scale * (a + a^dag)`` the Weyl kernel of the characteristic
    function is the displacement operator with amplitude
    ``zeta = i k x_scale - s / (2 x_scale)``.
    """
    k = np.asarray(k, dtype=float)
    s = np.asarray(s, dtype=float)
    return 1j * k * x_scale - s / (2.0 * x_scale)
