"""MRT symbol precoder, zero-forcing artificial-noise projector, frame assembly."""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "PAM4",
    "pam_constellation",
    "PrecoderPair",
    "TransmitFrame",
    "DCBiasError",
    "mrt_precoder",
    "an_projector",
    "gnp_precoder",
    "baseline_precoder",
    "sample_artificial_noise",
    "compose_transmit",
]


def pam_constellation(order=4):
    """Equiprobable PAM levels scaled to unit average power."""
    if order < 2:
        raise ValueError("PAM order must be at least 2")
    levels = np.arange(-(order - 1), order, 2, dtype=float)
    return levels / np.sqrt(np.mean(levels**2))


PAM4 = pam_constellation(4)


class DCBiasError(ValueError):
    """Precoded signal would drive an LED below zero intensity."""

    def __init__(self, index, value, i_dc):
        super().__init__(f"|s[{index}]| = {abs(value):.6g} exceeds the DC bias {i_dc:.6g}")
        self.index = index
        self.value = value
        self.i_dc = i_dc


@dataclass(frozen=True)
class PrecoderPair:
    w: np.ndarray
    W_a: np.ndarray

    @property
    def n_tx(self):
        return len(self.w)


@dataclass(frozen=True)
class TransmitFrame:
    s_i: float
    s_a: np.ndarray
    s: np.ndarray
    x: np.ndarray
    i_dc: float


def _as_channel(h):
    h = np.asarray(h, dtype=float).ravel()
    norm = np.linalg.norm(h)
    if not norm > 0:
        raise ValueError("channel vector is zero; no precoder exists")
    return h, norm


def mrt_precoder(h):
    """Unit vector along ``h``."""
    h, norm = _as_channel(h)
    return h / norm


def an_projector(h):
    """Orthogonal projector onto the null space of ``h^T``: ``I - h h^+``."""
    h, norm = _as_channel(h)
    u = h / norm
    p = np.eye(len(h)) - np.outer(u, u)
    return 0.5 * (p + p.T)


def gnp_precoder(h_bob):
    return PrecoderPair(mrt_precoder(h_bob), an_projector(h_bob))


def baseline_precoder(geometric_gains):
    """Precoders built on Bob's plate-free geometric channel.

    ``geometric_gains`` is either the per-LED summed gain vector or the full
    ``(n_tx, n_paths)`` gain array, which is summed over paths.
    """
    g = np.asarray(geometric_gains, dtype=float)
    if g.ndim == 2:
        g = g.sum(axis=1)
    if np.any(g < 0):
        raise ValueError("geometric gains must be non-negative")
    return PrecoderPair(mrt_precoder(g), an_projector(g))


def sample_artificial_noise(s_i, constellation, rng, n_tx):
    """Draw ``n_tx`` artificial-noise symbols uniformly from the other levels."""
    constellation = np.asarray(constellation, dtype=float)
    if len(constellation) < 2:
        raise ValueError("constellation needs at least two symbols")
    others = constellation[~np.isclose(constellation, s_i)]
    if len(others) == len(constellation):
        raise ValueError(f"intended symbol {s_i} is not in the constellation")
    return others[rng.integers(0, len(others), size=n_tx)]


def compose_transmit(p, s_i, s_a, i_dc, zeta, p_tx):
    """DC-biased LED intensities ``zeta P_TX (I_DC 1 + w s_I + W_a s_a / N_t)``.

    Raises
    ------
    DCBiasError
        If any precoded component exceeds the bias; the signal is never clipped.
    """
    if i_dc <= 0:
        raise ValueError("DC bias must be positive")
    s_a = np.asarray(s_a, dtype=float)
    s = p.w * s_i + p.W_a @ s_a / p.n_tx
    over = np.flatnonzero(np.abs(s) > i_dc)
    if len(over):
        k = int(over[np.argmax(np.abs(s[over]))])
        raise DCBiasError(k, float(s[k]), i_dc)
    x = zeta * p_tx * (i_dc + s)
    return TransmitFrame(float(s_i), s_a, s, x, float(i_dc))
