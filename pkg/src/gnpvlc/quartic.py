"""Closed-form roots of complex polynomials up to degree four.

The quartic path is Ferrari's method with a Cardano resolvent cubic. Roots
are refined with two Newton steps. Nearly repeated roots (tiny discriminant)
and any root with an unacceptable residual are handed to the companion-matrix
eigenvalue solver instead.
"""

import numpy as np

__all__ = [
    "solve_linear",
    "solve_quadratic",
    "solve_cubic",
    "ferrari_roots",
    "quartic_discriminant",
    "solve_polynomial",
    "poly_residual",
]

_EPS = np.finfo(float).eps
DISCRIMINANT_RTOL = 1e-12
RESIDUAL_RTOL = 1e-8


def _csqrt(z):
    return np.sqrt(complex(z))


def _ccbrt(z):
    z = complex(z)
    if z == 0:
        return 0j
    return abs(z) ** (1.0 / 3.0) * np.exp(1j * np.angle(z) / 3.0)


def solve_linear(a, b):
    return [complex(-b / a)]


def solve_quadratic(a, b, c):
    """Roots of ``a t^2 + b t + c`` using the cancellation-free form."""
    a, b, c = complex(a), complex(b), complex(c)
    disc = _csqrt(b * b - 4 * a * c)
    # pick the sign that avoids subtracting nearly equal numbers
    if (np.conj(b) * disc).real < 0:
        disc = -disc
    q = -0.5 * (b + disc)
    if q == 0:
        return [0j, 0j]
    return [q / a, c / q]


def solve_cubic(a, b, c, d):
    """Roots of ``a t^3 + b t^2 + c t + d`` by Cardano's formula."""
    a, b, c, d = (complex(v) for v in (a, b, c, d))
    b, c, d = b / a, c / a, d / a
    p = c - b * b / 3
    q = 2 * b**3 / 27 - b * c / 3 + d
    disc = _csqrt(q * q / 4 + p**3 / 27)
    u3 = -q / 2 + disc
    u3_alt = -q / 2 - disc
    if abs(u3_alt) > abs(u3):
        u3 = u3_alt
    shift = -b / 3
    if abs(u3) == 0:
        # p = q = 0: triple root
        return [shift] * 3
    u = _ccbrt(u3)
    omega = np.exp(2j * np.pi / 3)
    roots = []
    for k in range(3):
        uk = u * omega**k
        roots.append(uk - p / (3 * uk) + shift)
    return roots


def quartic_discriminant(a, b, c, d, e):
    a, b, c, d, e = (complex(v) for v in (a, b, c, d, e))
    return (
        256 * a**3 * e**3 - 192 * a**2 * b * d * e**2 - 128 * a**2 * c**2 * e**2
        + 144 * a**2 * c * d**2 * e - 27 * a**2 * d**4 + 144 * a * b**2 * c * e**2
        - 6 * a * b**2 * d**2 * e - 80 * a * b * c**2 * d * e + 18 * a * b * c * d**3
        + 16 * a * c**4 * e - 4 * a * c**3 * d**2 - 27 * b**4 * e**2
        + 18 * b**3 * c * d * e - 4 * b**3 * d**3 - 4 * b**2 * c**3 * e
        + b**2 * c**2 * d**2
    )


def ferrari_roots(a, b, c, d, e):
    """The four roots of ``a t^4 + b t^3 + c t^2 + d t + e`` (``a != 0``)."""
    a, b, c, d, e = (complex(v) for v in (a, b, c, d, e))
    B, C, D, E = b / a, c / a, d / a, e / a
    # depressed quartic y^4 + p y^2 + q y + r with t = y - B/4
    p = C - 3 * B * B / 8
    q = D - B * C / 2 + B**3 / 8
    r = E - B * D / 4 + B * B * C / 16 - 3 * B**4 / 256
    shift = -B / 4
    scale = max(abs(p), abs(q) ** (2 / 3), abs(r) ** 0.5, _EPS)
    if abs(q) <= 1e-14 * scale**1.5:
        ys = []
        for z in solve_quadratic(1, p, r):
            s = _csqrt(z)
            ys += [s, -s]
        return [y + shift for y in ys]
    # resolvent 8 m^3 + 8 p m^2 + (2 p^2 - 8 r) m - q^2 = 0, any root m != 0
    ms = solve_cubic(8, 8 * p, 2 * p * p - 8 * r, -q * q)
    m = max(ms, key=abs)
    rt = _csqrt(2 * m)
    ys = []
    for s1 in (1, -1):
        inner = _csqrt(-(2 * p + 2 * m + s1 * 2 * q / rt))
        for s2 in (1, -1):
            ys.append((s1 * rt + s2 * inner) / 2)
    return [y + shift for y in ys]


def poly_residual(coeffs, t):
    """``|p(t)|`` relative to the size of the terms being summed."""
    coeffs = np.asarray(coeffs, dtype=complex)
    t = np.asarray(t, dtype=complex)
    powers = np.abs(t)[..., None] ** np.arange(len(coeffs) - 1, -1, -1)
    size = np.sum(np.abs(coeffs) * powers, axis=-1)
    return np.abs(np.polyval(coeffs, t)) / np.maximum(size, np.finfo(float).tiny)


def _newton(coeffs, roots, steps=2):
    dcoeffs = np.polyder(coeffs)
    out = []
    for t in roots:
        for _ in range(steps):
            f = np.polyval(coeffs, t)
            df = np.polyval(dcoeffs, t)
            if df == 0:
                break
            t_new = t - f / df
            if abs(np.polyval(coeffs, t_new)) >= abs(f):
                break
            t = t_new
        out.append(complex(t))
    return out


def solve_polynomial(coeffs, return_method=False):
    """All roots of a polynomial of degree <= 4 (highest power first).

    Leading coefficients that are negligible relative to the largest one are
    dropped and the lower-degree closed form is used.

    Returns
    -------
    roots : list of complex
    method : str, only if ``return_method``
        ``"ferrari"``, ``"cardano"``, ``"quadratic"``, ``"linear"`` or
        ``"companion"``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if coeffs.ndim != 1 or len(coeffs) > 5:
        raise ValueError("expected at most five coefficients")
    norm = np.max(np.abs(coeffs)) if len(coeffs) else 0.0
    if norm == 0:
        raise ValueError("zero polynomial")
    k = 0
    while k < len(coeffs) - 1 and abs(coeffs[k]) <= 1e-14 * norm:
        k += 1
    coeffs = coeffs[k:]
    degree = len(coeffs) - 1
    if degree == 0:
        roots, method = [], "constant"
    elif degree == 1:
        roots, method = solve_linear(*coeffs), "linear"
    elif degree == 2:
        roots, method = solve_quadratic(*coeffs), "quadratic"
    elif degree == 3:
        roots, method = solve_cubic(*coeffs), "cardano"
    else:
        disc = quartic_discriminant(*coeffs)
        cnorm = np.max(np.abs(coeffs / coeffs[0]))
        if abs(disc / coeffs[0] ** 6) <= DISCRIMINANT_RTOL * cnorm**6:
            roots, method = list(np.roots(coeffs)), "companion"
        else:
            roots, method = ferrari_roots(*coeffs), "ferrari"
    if degree >= 2:
        roots = _newton(coeffs, roots)
        if method != "companion" and np.any(poly_residual(coeffs, roots) > RESIDUAL_RTOL):
            roots, method = _newton(coeffs, list(np.roots(coeffs))), "companion"
    roots = [complex(r) for r in roots]
    return (roots, method) if return_method else roots
