"""Jones / Stokes / Mueller calculus.

Conventions
-----------
* Jones vectors are complex arrays of shape ``(2,)``. In the linear basis the
  components are ``(E_x, E_y)``; in the circular basis they are ``(E_L, E_R)``
  in that order.
* Stokes vectors are real arrays ``(s0, s1, s2, s3)`` with
  ``s3 = -2 Im(E_x E_y*)``. This fixes which circular component is called
  "left"; the handedness in a lab frame is not asserted anywhere.
* Mueller matrices are real ``(4, 4)`` arrays.
"""

import numpy as np

__all__ = [
    "LINEAR_TO_CIRCULAR",
    "CIRCULAR_TO_LINEAR",
    "JONES_TO_MUELLER",
    "stokes_from_jones",
    "jones_from_stokes",
    "degree_of_polarization",
    "linear_to_circular",
    "circular_to_linear",
    "polarizer_jones",
    "polarizer_circular",
    "mueller_from_jones",
    "polarizer_mueller",
]

# rows ordered (LCP, RCP)
LINEAR_TO_CIRCULAR = np.array([[1.0, -1.0j], [1.0, 1.0j]]) / np.sqrt(2.0)
CIRCULAR_TO_LINEAR = LINEAR_TO_CIRCULAR.conj().T

JONES_TO_MUELLER = np.array(
    [
        [1, 0, 0, 1],
        [1, 0, 0, -1],
        [0, 1, 1, 0],
        [0, 1j, -1j, 0],
    ],
    dtype=complex,
)
_MUELLER_TO_JONES = np.linalg.inv(JONES_TO_MUELLER)

# tolerance on 1 - p for a state to count as fully polarized
FULLY_POLARIZED_RTOL = 1e-9
# largest imaginary residue tolerated when building a Mueller matrix
MUELLER_IMAG_TOL = 1e-12


def stokes_from_jones(j):
    """Stokes vector of a fully polarized field given in the linear basis."""
    ex, ey = np.asarray(j, dtype=complex)
    cross = ex * np.conj(ey)
    return np.array(
        [
            abs(ex) ** 2 + abs(ey) ** 2,
            abs(ex) ** 2 - abs(ey) ** 2,
            2.0 * cross.real,
            -2.0 * cross.imag,
        ]
    )


def degree_of_polarization(s):
    s = np.asarray(s, dtype=float)
    if s[0] == 0.0:
        return 0.0
    return float(np.linalg.norm(s[1:]) / s[0])


def jones_from_stokes(s, rtol=FULLY_POLARIZED_RTOL):
    """Invert :func:`stokes_from_jones` for a fully polarized Stokes vector.

    The global phase is fixed so that ``E_x`` is real and non-negative; when
    ``|E_x|`` vanishes, ``E_y`` is made real and non-negative instead.

    Parameters
    ----------
    s : array_like, shape (4,)
        Stokes vector ``(s0, s1, s2, s3)``.
    rtol : float
        Relative tolerance on ``sqrt(s1^2 + s2^2 + s3^2) == s0``.

    Returns
    -------
    numpy.ndarray
        Complex Jones vector ``(E_x, E_y)``.

    Raises
    ------
    ValueError
        If ``s`` is not fully polarized (no Jones representation exists) or
        has negative intensity.
    """
    s0, s1, s2, s3 = np.asarray(s, dtype=float)
    if not np.all(np.isfinite([s0, s1, s2, s3])):
        raise ValueError("Stokes vector must be finite")
    if s0 < 0:
        raise ValueError(f"negative intensity s0={s0}")
    pol = np.sqrt(s1 * s1 + s2 * s2 + s3 * s3)
    if abs(pol - s0) > rtol * max(s0, np.finfo(float).tiny):
        if s0 == 0.0 and pol == 0.0:
            return np.zeros(2, dtype=complex)
        raise ValueError(
            f"Stokes vector is not fully polarized (p={pol / s0 if s0 else np.inf:.3g}); "
            "a Jones vector exists only for fully polarized light"
        )
    # E_x E_y* = (s2 - j s3) / 2; take the stronger component from its own
    # intensity and the other from the cross term, avoiding s0 + s1 cancellation
    cross = 0.5 * (s2 - 1j * s3)
    if s1 >= 0:
        ax = np.sqrt(0.5 * (s0 + s1))
        if ax == 0.0:
            return np.zeros(2, dtype=complex)
        return np.array([ax, np.conj(cross / ax)], dtype=complex)
    ay = np.sqrt(0.5 * (s0 - s1))
    ex = cross / ay
    if abs(ex) == 0.0:
        return np.array([0.0, ay], dtype=complex)
    # rotate the global phase so that E_x is real and positive
    return np.array([abs(ex), ay * np.exp(-1j * np.angle(ex))], dtype=complex)


def linear_to_circular(j):
    """Map ``(E_x, E_y)`` to ``(E_L, E_R)``."""
    return LINEAR_TO_CIRCULAR @ np.asarray(j, dtype=complex)


def circular_to_linear(j):
    return CIRCULAR_TO_LINEAR @ np.asarray(j, dtype=complex)


def polarizer_jones(theta):
    """Jones matrix (linear basis) of an ideal linear polarizer at ``theta`` rad."""
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c * c, c * s], [c * s, s * s]], dtype=complex)


def polarizer_circular(theta):
    """Ideal linear polarizer expressed in the (LCP, RCP) basis.

    Retards the RCP component by ``2 theta`` relative to the LCP one.
    """
    e = np.exp(2j * theta)
    return 0.5 * np.array([[1.0, np.conj(e)], [e, 1.0]])


def mueller_from_jones(jm):
    """Mueller matrix of a non-depolarizing element with Jones matrix ``jm``.

    Raises
    ------
    ArithmeticError
        If the conversion leaves an imaginary residue above
        ``MUELLER_IMAG_TOL`` (scaled by the matrix norm).
    """
    jm = np.asarray(jm, dtype=complex)
    m = JONES_TO_MUELLER @ np.kron(jm, jm.conj()) @ _MUELLER_TO_JONES
    scale = max(1.0, float(np.max(np.abs(m))))
    residue = float(np.max(np.abs(m.imag)))
    if residue > MUELLER_IMAG_TOL * scale:
        raise ArithmeticError(f"Mueller conversion left imaginary residue {residue:.3g}")
    return m.real.copy()


def polarizer_mueller(theta):
    """Closed-form Mueller matrix of a linear polarizer at ``theta`` rad."""
    c, s = np.cos(2 * theta), np.sin(2 * theta)
    return 0.5 * np.array(
        [
            [1.0, c, s, 0.0],
            [c, c * c, s * c, 0.0],
            [s, s * c, s * s, 0.0],
            [0.0, 0.0, 0.0, 0.0],
        ]
    )
