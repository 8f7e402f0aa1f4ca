"""Effective VLC channel through GNP plates and linear polarizers.

Two routes to the photodiode current are provided and must agree:

* the circular-polarization chain (transmit amplitudes, per-path received
  amplitudes, photodiode intensity), and
* the closed-form effective channel ``h`` with ``y = eta/8 * h @ x``.

Paths from incoherent LED light add in intensity at the photodiode, so the
received amplitudes are kept per path; delay phases then drop out exactly.
"""

from dataclasses import dataclass

import numpy as np

from . import geometry
from .gnp import GnpPathResponse, sample_responses
from .polarization import polarizer_circular

__all__ = [
    "PolarizerConfig",
    "ReceiverChannel",
    "dbm_to_watts",
    "rho_scale",
    "transmit_cp_amplitudes",
    "received_cp_amplitudes",
    "received_cp_amplitudes_block",
    "pd_intensity",
    "effective_channel",
    "geometric_channel",
    "received_symbol_signal",
    "build_receiver_channel",
]

_ANGLE_TOL = 1e-9


def dbm_to_watts(dbm):
    return 10.0 ** ((np.asarray(dbm, dtype=float) - 30.0) / 10.0)


def rho_scale(eta, zeta, p_tx):
    """Signal scale ``eta * zeta * P_TX / 8`` after removing the DC bias."""
    return eta * zeta * p_tx / 8.0


@dataclass(frozen=True)
class PolarizerConfig:
    """Polarizer angles (rad) at the transmitters and at one receiver."""

    tx_angles: np.ndarray
    rx_angle: float = 0.0

    def __post_init__(self):
        tx = np.atleast_1d(np.asarray(self.tx_angles, dtype=float))
        object.__setattr__(self, "tx_angles", tx)
        object.__setattr__(self, "rx_angle", float(self.rx_angle))
        allowed = np.pi / 2 + _ANGLE_TOL
        if np.any(np.abs(tx) > allowed) or abs(self.rx_angle) > allowed:
            raise ValueError("polarizer angles must lie in [-pi/2, pi/2]")

    def with_rx(self, rx_angle):
        return PolarizerConfig(self.tx_angles, rx_angle)


@dataclass(frozen=True)
class ReceiverChannel:
    """Geometric paths and plate responses from every LED to one receiver.

    All arrays have shape ``(n_tx, n_paths)``; column 0 is the LOS path and
    rows are padded with zero-gain paths where an LED has fewer reflections.
    """

    gains: np.ndarray
    delay_phases: np.ndarray
    response: GnpPathResponse
    label: str = "rx"

    def __post_init__(self):
        g = np.asarray(self.gains, dtype=float)
        if g.ndim != 2:
            raise ValueError("gains must be a (n_tx, n_paths) array")
        if np.any(g < 0):
            raise ValueError("path gains must be non-negative")
        for name in ("delay_phases",):
            if np.shape(getattr(self, name)) != g.shape:
                raise ValueError(f"{name} shape does not match gains")
        for name in ("a_bar_l", "a_bar_r", "delta_phi"):
            if np.shape(getattr(self.response, name)) != g.shape:
                raise ValueError(f"response.{name} shape does not match gains")

    @property
    def n_tx(self):
        return self.gains.shape[0]

    @property
    def a_bar_l(self):
        return self.response.a_bar_l

    @property
    def a_bar_r(self):
        return self.response.a_bar_r

    @property
    def delta_phi(self):
        return self.response.delta_phi


def build_receiver_channel(scene, rx, ranges, rng, label="rx"):
    """Trace ``rx`` in ``scene`` and draw i.i.d. plate responses per path."""
    gains, phases, _ = geometry.receiver_paths(scene, rx)
    resp = sample_responses(ranges, rng, gains.shape)
    return ReceiverChannel(gains, phases, resp, label)


def transmit_cp_amplitudes(x_m, theta_m):
    """(LCP, RCP) amplitudes of unpolarized intensity ``x_m`` after a polarizer."""
    if np.any(np.asarray(x_m) < 0):
        raise ValueError("transmit intensity must be non-negative")
    amp = np.sqrt(x_m) / 2.0
    return np.stack([amp * np.exp(-1j * np.asarray(theta_m)), amp * np.exp(1j * np.asarray(theta_m))])


def _check_x(rc, x):
    x = np.asarray(x, dtype=float)
    if x.shape != (rc.n_tx,):
        raise ValueError(f"intensity vector has shape {x.shape}, expected ({rc.n_tx},)")
    if np.any(x < 0):
        raise ValueError("transmit intensities must be non-negative")
    return x


def received_cp_amplitudes(rc, pc, x):
    """Per-path (LCP, RCP) amplitudes just before the photodiode.

    Returns
    -------
    r_l, r_r : numpy.ndarray, shape (n_tx, n_paths)
    """
    x = _check_x(rc, x)
    th = pc.tx_angles[:, None]
    thc = pc.rx_angle
    pre = np.sqrt(rc.gains * x[:, None]) / 4.0
    sl, sr = np.sqrt(rc.a_bar_l), np.sqrt(rc.a_bar_r)
    vt, dp = rc.delay_phases, rc.delta_phi
    r_l = pre * (sl * np.exp(1j * (vt - th)) + sr * np.exp(1j * (vt - 2 * thc + th + dp)))
    r_r = pre * (sl * np.exp(1j * (vt + 2 * thc - th)) + sr * np.exp(1j * (vt + th + dp)))
    return r_l, r_r


def received_cp_amplitudes_block(rc, pc, x):
    """Same as :func:`received_cp_amplitudes`, via explicit per-path matrices.

    Builds, for each path index, the stacked ``2 n_tx`` system of receiver
    polarizer times block-diagonal plate/propagation matrices and applies it
    to the stacked transmit amplitudes.
    """
    x = _check_x(rc, x)
    n_tx, n_paths = rc.gains.shape
    eye = np.eye(n_tx)
    rx_pol = np.kron(polarizer_circular(pc.rx_angle), eye)
    tx = transmit_cp_amplitudes(x, pc.tx_angles)  # (2, n_tx)
    v = np.concatenate([tx[0], tx[1]])
    r_l = np.empty((n_tx, n_paths), dtype=complex)
    r_r = np.empty((n_tx, n_paths), dtype=complex)
    for n in range(n_paths):
        prop = np.sqrt(rc.gains[:, n]) * np.exp(1j * rc.delay_phases[:, n])
        plate_l = np.sqrt(rc.a_bar_l[:, n])
        plate_r = np.sqrt(rc.a_bar_r[:, n]) * np.exp(1j * rc.delta_phi[:, n])
        block = np.zeros((2 * n_tx, 2 * n_tx), dtype=complex)
        block[:n_tx, :n_tx] = np.diag(prop * plate_l)
        block[n_tx:, n_tx:] = np.diag(prop * plate_r)
        out = rx_pol @ block @ v
        r_l[:, n], r_r[:, n] = out[:n_tx], out[n_tx:]
    return r_l, r_r


def pd_intensity(cp_pairs, eta, noise=0.0):
    """Photodiode current ``eta * sum(|r_L|^2 + |r_R|^2) + noise``."""
    if eta <= 0:
        raise ValueError("responsivity must be positive")
    r_l, r_r = cp_pairs
    return eta * float(np.sum(np.abs(r_l) ** 2) + np.sum(np.abs(r_r) ** 2)) + noise


def effective_channel(rc, pc):
    """Real per-LED effective gains including plates and polarizers."""
    if pc.tx_angles.shape != (rc.n_tx,):
        raise ValueError("one transmitter angle per LED is required")
    al, ar = rc.a_bar_l, rc.a_bar_r
    w = 2 * pc.rx_angle - 2 * pc.tx_angles[:, None] - rc.delta_phi
    terms = rc.gains * (al + ar + 2 * np.sqrt(al * ar) * np.cos(w))
    return terms.sum(axis=1)


def geometric_channel(gains):
    """Per-LED sum of path gains, the channel seen without plates or polarizers."""
    return np.asarray(gains, dtype=float).sum(axis=1)


def received_symbol_signal(h, rho, s, noise_var=0.0, rng=None):
    """Bias-free observation ``rho * h @ s + z`` with ``z ~ N(0, noise_var)``.

    ``s`` is the precoded vector ``w s_I + W_a s_a / N_t``.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    y = rho * float(np.asarray(h) @ np.asarray(s))
    if noise_var > 0:
        if rng is None:
            raise ValueError("a random generator is required when noise_var > 0")
        y += rng.normal(0.0, np.sqrt(noise_var))
    return y
