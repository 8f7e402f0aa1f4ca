"""Polarizer-angle optimization.

Transmitter angles push Eve's effective channel down assuming Eve's own
polarizer sits at 0 rad. Bob's angle then maximizes his effective channel;
its stationarity condition is a quartic in ``t = exp(j theta_tilde)``.
"""

from dataclasses import dataclass

import numpy as np

from .gnp import asymmetry
from .quartic import solve_polynomial

__all__ = [
    "TxAngleSolution",
    "QuarticProblem",
    "BobAngleSolution",
    "ConvergenceError",
    "wrap_half_pi",
    "objective_eve",
    "objective_eve_grad",
    "objective_eve_hess",
    "tx_angles_suboptimal",
    "tx_angles_iterative",
    "objective_bob",
    "objective_bob_grad",
    "objective_bob_hess",
    "quartic_coefficients",
    "solve_quartic",
    "bob_angle",
    "grid_bob_angle",
]

DEFAULT_EPS = 1e-9
DEFAULT_MAX_ITER = 100


class ConvergenceError(RuntimeError):
    def __init__(self, message, last):
        super().__init__(message)
        self.last = last


def wrap_half_pi(theta):
    """Map angles onto ``[-pi/2, pi/2)``; polarizers are pi-periodic."""
    return np.mod(np.asarray(theta, dtype=float) + np.pi / 2, np.pi) - np.pi / 2


@dataclass(frozen=True)
class TxAngleSolution:
    theta_star: np.ndarray
    k: int
    method: str
    iterations: int = 0


@dataclass(frozen=True)
class QuarticProblem:
    A1: float
    A2: float
    A3: float
    A4: float
    theta_ref: float = 0.0

    @property
    def coefficients(self):
        """Coefficients of ``t^4 .. t^0`` (the ``t^2`` term vanishes)."""
        A1, A2, A3, A4 = self.A1, self.A2, self.A3, self.A4
        return np.array(
            [-1j * A1 - 2 * A2, -2j * A3 + 2 * A4, 0.0, 2j * A3 + 2 * A4, 1j * A1 - 2 * A2]
        )

    def derivative(self, theta_tilde):
        """Stationarity expression in trigonometric form (zero at extrema of f_B)."""
        s, c = np.sin(theta_tilde), np.cos(theta_tilde)
        return self.A1 * s * c + self.A2 * (s * s - c * c) + self.A3 * s + self.A4 * c


@dataclass(frozen=True)
class BobAngleSolution:
    theta_b_star: float
    t_star: complex
    objective_value: float
    fallback: bool = False


# --------------------------------------------------------------------------
# Eve side

def _eve_terms(thetas, rc):
    thetas = np.broadcast_to(np.asarray(thetas, dtype=float), (rc.n_tx,))
    x = 2 * thetas[:, None] + rc.delta_phi
    return rc.gains, x, asymmetry(rc.a_bar_l, rc.a_bar_r)


def objective_eve(thetas, rc_eve):
    """``sum g cos(2 theta_m + dphi) (cos(2 theta_m + dphi) + u)`` over paths."""
    g, x, u = _eve_terms(thetas, rc_eve)
    c = np.cos(x)
    return float(np.sum(g * c * (c + u)))


def objective_eve_grad(thetas, rc_eve):
    """Partial derivatives of :func:`objective_eve`, one per transmitter."""
    g, x, u = _eve_terms(thetas, rc_eve)
    return np.sum(-2 * g * np.sin(x) * (2 * np.cos(x) + u), axis=1)


def objective_eve_hess(thetas, rc_eve):
    """Diagonal of the Hessian (the objective is separable in the angles)."""
    g, x, u = _eve_terms(thetas, rc_eve)
    c, s = np.cos(x), np.sin(x)
    return np.sum(g * (-4 * c * (2 * c + u) + 8 * s * s), axis=1)


def tx_angles_suboptimal(delta_phi_bounds, n_tx=1):
    """Eve-agnostic transmitter angle ``pi/2 - mean(dphi)/2`` for every LED."""
    lo, hi = delta_phi_bounds
    if lo > hi:
        raise ValueError("delta_phi_bounds must satisfy lower <= upper")
    theta = np.pi / 2 - (lo + hi) / 4
    return TxAngleSolution(np.full(n_tx, theta), 1, "suboptimal")


def tx_angles_iterative(rc_eve, eps=DEFAULT_EPS, max_iter=DEFAULT_MAX_ITER, theta0=None):
    """Per-LED stationary point of Eve's objective by fixed-point iteration.

    Each step re-weights the paths with ``g (2 cos(2 theta + dphi) + u)`` at
    the previous iterate and sets ``theta = k pi/2 - angle(sum w e^{j dphi}) / 2``
    on the branch closest to the previous iterate.

    Raises
    ------
    ConvergenceError
        If some angle still moves by ``eps`` or more after ``max_iter`` steps;
        ``.last`` holds the last iterate.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    g, _, u = _eve_terms(0.0, rc_eve)
    dphi = rc_eve.delta_phi
    phasor = np.exp(1j * dphi)
    if theta0 is None:
        mean_dphi = np.sum(g * dphi, axis=1) / np.sum(g, axis=1)
        theta0 = np.pi / 2 - mean_dphi / 2
    theta = wrap_half_pi(np.broadcast_to(theta0, (rc_eve.n_tx,)).copy())
    # relaxed update theta + lam (T(theta) - theta), lam = 1 / (1 - T') from a
    # secant estimate of the map's slope; fixed points are those of the plain
    # map, but near-degenerate LOS paths (u close to 2) no longer make it
    # oscillate
    relax = np.ones(rc_eve.n_tx)
    prev_theta = prev_target = None
    for it in range(1, max_iter + 1):
        weights = g * (2 * np.cos(2 * theta[:, None] + dphi) + u)
        half = -0.5 * np.angle(np.sum(weights * phasor, axis=1))
        k = np.round((theta - half) / (np.pi / 2))
        full = wrap_half_pi(half + k * np.pi / 2 - theta)
        target = theta + full
        if prev_theta is not None:
            moved = wrap_half_pi(theta - prev_theta)
            ok = np.abs(moved) > 1e-14
            slope = np.where(ok, wrap_half_pi(target - prev_target) / np.where(ok, moved, 1.0), 0.0)
            relax = np.where(ok, np.clip(1.0 / (1.0 - np.minimum(slope, 0.875)), 1 / 64, 8.0), relax)
        step = np.abs(full)
        if np.all(step < eps):
            theta = wrap_half_pi(target)
            break
        prev_theta, prev_target = theta, target
        theta = wrap_half_pi(theta + relax * full)
    else:
        raise ConvergenceError(f"fixed point not reached in {max_iter} iterations", theta)
    # a stationary point that is a maximum sits pi/2 away from the minimum
    flip = objective_eve_hess(theta, rc_eve) <= 0
    if np.any(flip):
        theta = np.where(flip, wrap_half_pi(theta + np.pi / 2), theta)
        return tx_angles_iterative(rc_eve, eps, max_iter, theta)
    return TxAngleSolution(theta, 1, "iterative", it)


# --------------------------------------------------------------------------
# Bob side

def _bob_terms(theta_b, rc, tx_angles):
    tx = np.broadcast_to(np.asarray(tx_angles, dtype=float), (rc.n_tx,))
    theta_b = np.asarray(theta_b, dtype=float)
    omega = 2 * theta_b[..., None, None] - 2 * tx[:, None] - rc.delta_phi
    return rc.gains, omega, asymmetry(rc.a_bar_l, rc.a_bar_r)


def objective_bob(theta_b, rc_bob, tx_angles):
    """``sum g cos(w) (cos(w) + u)`` with ``w = 2 theta_B - 2 theta_m - dphi``.

    Vectorized over ``theta_b``.
    """
    g, w, u = _bob_terms(theta_b, rc_bob, tx_angles)
    c = np.cos(w)
    return np.sum(g * c * (c + u), axis=(-2, -1))


def objective_bob_grad(theta_b, rc_bob, tx_angles):
    g, w, u = _bob_terms(theta_b, rc_bob, tx_angles)
    return np.sum(-2 * g * np.sin(w) * (2 * np.cos(w) + u), axis=(-2, -1))


def objective_bob_hess(theta_b, rc_bob, tx_angles):
    g, w, u = _bob_terms(theta_b, rc_bob, tx_angles)
    c, s = np.cos(w), np.sin(w)
    return np.sum(g * (-8 * c * c + 8 * s * s - 4 * u * c), axis=(-2, -1))


def _reference_angle(tx_angles):
    tx = np.atleast_1d(np.asarray(tx_angles, dtype=float))
    return float(tx[0])


def quartic_coefficients(rc_bob, tx_angles):
    """Coefficients ``A1..A4`` of Bob's stationarity quartic.

    With ``theta_tilde = 2 (theta_B - theta_ref)``, where ``theta_ref`` is the
    first transmitter angle, each path contributes through its offset
    ``dphi + 2 (theta_m - theta_ref)``; for a common transmitter angle the
    offset is just the plate retardation.
    """
    ref = _reference_angle(tx_angles)
    tx = np.broadcast_to(np.asarray(tx_angles, dtype=float), (rc_bob.n_tx,))
    delta = rc_bob.delta_phi + 2 * (tx[:, None] - ref)
    g = rc_bob.gains
    u = asymmetry(rc_bob.a_bar_l, rc_bob.a_bar_r)
    cd, sd = np.cos(delta), np.sin(delta)
    return QuarticProblem(
        A1=float(np.sum(g * (2 * cd**2 - 2 * sd**2))),
        A2=float(np.sum(2 * g * sd * cd)),
        A3=float(np.sum(g * cd * u)),
        A4=float(-np.sum(g * sd * u)),
        theta_ref=ref,
    )


def solve_quartic(q):
    """Roots ``t`` of Bob's quartic (fewer if the leading terms vanish)."""
    return solve_polynomial(q.coefficients)


UNIT_CIRCLE_TOL = 1e-6


def _polish_tilde(q, x, steps=3):
    # Newton on the trigonometric stationarity equation
    for _ in range(steps):
        s, c = np.sin(x), np.cos(x)
        f = q.derivative(x)
        df = q.A1 * (c * c - s * s) + 4 * q.A2 * s * c + q.A3 * c - q.A4 * s
        if df == 0:
            break
        x_new = x - f / df
        if abs(q.derivative(x_new)) >= abs(f):
            break
        x = x_new
    return x


def grid_bob_angle(rc_bob, tx_angles, step=1e-5, chunk=4096):
    """Brute-force maximizer of :func:`objective_bob` on a uniform grid."""
    grid = np.arange(-np.pi / 2, np.pi / 2, step)
    best_v, best_t = -np.inf, 0.0
    for i in range(0, len(grid), chunk):
        v = objective_bob(grid[i : i + chunk], rc_bob, tx_angles)
        j = int(np.argmax(v))
        if v[j] > best_v:
            best_v, best_t = float(v[j]), float(grid[i + j])
    return best_t, best_v


def bob_angle(rc_bob, tx_angles):
    """Bob's polarizer angle from the unit-circle roots of his quartic.

    Every root with ``|t| = 1`` is a stationary point; the one with negative
    curvature and the largest objective wins. If no root qualifies, a grid
    search is used and ``fallback`` is set.
    """
    q = quartic_coefficients(rc_bob, tx_angles)
    best = None
    for t in solve_quartic(q):
        if abs(abs(t) - 1) > UNIT_CIRCLE_TOL:
            continue
        tilde = _polish_tilde(q, float(np.angle(t)))
        theta_b = float(wrap_half_pi(q.theta_ref + tilde / 2))
        if objective_bob_hess(theta_b, rc_bob, tx_angles) >= 0:
            continue
        value = float(objective_bob(theta_b, rc_bob, tx_angles))
        if best is None or value > best.objective_value:
            best = BobAngleSolution(theta_b, complex(t), value)
    if best is not None:
        return best
    theta_b, value = grid_bob_angle(rc_bob, tx_angles, step=1e-4)
    tilde = 2 * (theta_b - q.theta_ref)
    return BobAngleSolution(theta_b, complex(np.exp(1j * tilde)), value, fallback=True)
