"""SINR, achievable and secrecy rates, ML detection and Monte Carlo SER."""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .precoding import PAM4

__all__ = [
    "SinrReport",
    "SerResult",
    "sinr",
    "sinr_pair",
    "sinr_eve_fform",
    "achievable_rate",
    "secrecy_rate",
    "ml_detect",
    "Detector",
    "ser_monte_carlo",
    "SER_CHUNK",
]

# trials per independently seeded chunk; part of the reproducibility contract
SER_CHUNK = 8192


@dataclass(frozen=True)
class SinrReport:
    sinr_bob: float
    sinr_eve: float


@dataclass(frozen=True)
class SerResult:
    ser_bob: float
    ser_eve: float
    n_trials: int
    seed: int
    errors_bob: int = 0
    errors_eve: int = 0


def sinr(h, p, rho, sigma2):
    """SINR of a receiver with effective channel ``h`` under precoders ``p``.

    The artificial noise counts as interference scaled by ``1/N_t^2``.
    """
    h = np.asarray(h, dtype=float)
    if sigma2 <= 0:
        raise ValueError("noise variance must be positive")
    signal = rho**2 * float(h @ p.w) ** 2
    leak = p.W_a.T @ h
    interference = rho**2 / p.n_tx**2 * float(leak @ leak)
    return signal / (interference + sigma2)


def sinr_eve_fform(h_e, w, rho, sigma2):
    """Eve's SINR through ``N_t^2 / (1/f - 1)``.

    ``f = (h_E . w)^2 / (|h_E|^2 + N_t^2 sigma^2 / rho^2)``; requires ``w`` to
    be Bob's unit MRT direction.
    """
    h_e = np.asarray(h_e, dtype=float)
    n = len(h_e)
    f = float(h_e @ w) ** 2 / (float(h_e @ h_e) + n**2 * sigma2 / rho**2)
    if f == 0:
        return 0.0
    return n**2 / (1.0 / f - 1.0)


def sinr_pair(h_b, h_e, p, rho, sigma2):
    return SinrReport(sinr(h_b, p, rho, sigma2), sinr(h_e, p, rho, sigma2))


def achievable_rate(snr):
    """Capacity lower bound ``0.5 log2(1 + e/(2 pi) SINR)`` in bit/s/Hz."""
    snr = np.asarray(snr, dtype=float)
    if np.any(snr < 0):
        raise ValueError("SINR must be non-negative")
    r = 0.5 * np.log2(1.0 + np.e / (2 * np.pi) * snr)
    return float(r) if r.ndim == 0 else r


def secrecy_rate(r_bob, r_eves):
    """``max(R_B - max_k R_E,k, 0)``; ``r_eves`` is a scalar or a sequence."""
    r_eves = np.atleast_1d(np.asarray(r_eves, dtype=float))
    if r_eves.size == 0:
        raise ValueError("at least one eavesdropper rate is required")
    return max(float(r_bob) - float(r_eves.max()), 0.0)


# --------------------------------------------------------------------------
# detection

def _noise_combos(constellation, n_tx):
    idx = np.array(list(itertools.product(range(len(constellation)), repeat=n_tx)), dtype=np.int64)
    return idx, constellation[idx]


class Detector:
    """Nearest-hypothesis ML detector for a scalar Gaussian observation.

    Hypotheses are labelled by the intended-symbol index. Exact distance ties
    go to the smallest symbol index.

    Parameters
    ----------
    h : array_like
        Receiver's effective channel.
    p : PrecoderPair
    rho : float
    constellation : array_like
    mode : {"bob", "eve", "eve_naive"}
        ``bob`` assumes the artificial noise is nulled, ``eve`` searches
        jointly over the intended symbol and every artificial-noise vector,
        ``eve_naive`` ignores the artificial noise.
    """

    MAX_HYPOTHESES = 1 << 20

    def __init__(self, h, p, rho, constellation=PAM4, mode="bob"):
        h = np.asarray(h, dtype=float)
        c = np.asarray(constellation, dtype=float)
        self.mode = mode
        if mode == "bob":
            values = rho * np.linalg.norm(h) * c
            labels = np.arange(len(c))
        elif mode == "eve_naive":
            values = rho * float(h @ p.w) * c
            labels = np.arange(len(c))
        elif mode == "eve":
            n = len(c) ** (p.n_tx + 1)
            if n > self.MAX_HYPOTHESES:
                raise ValueError(f"joint search over {n} hypotheses is too large")
            _, s_a = _noise_combos(c, p.n_tx)
            an = rho / p.n_tx * (s_a @ (p.W_a.T @ h))
            sym = rho * float(h @ p.w) * c
            values = (sym[:, None] + an[None, :]).ravel()
            labels = np.repeat(np.arange(len(c)), len(an))
        else:
            raise ValueError(f"unknown detector mode {mode!r}")
        # sorted by value, ties by label, so the first of an equal run has the
        # smallest symbol index
        order = np.lexsort((labels, values))
        self.values = values[order]
        self.labels = labels[order]
        self._run_start = np.searchsorted(self.values, self.values, side="left")

    def detect_index(self, y):
        """Detected symbol indices for observations ``y``."""
        y = np.asarray(y, dtype=float)
        v = self.values
        right = np.clip(np.searchsorted(v, y, side="left"), 0, len(v) - 1)
        left = self._run_start[np.clip(right - 1, 0, len(v) - 1)]
        right = self._run_start[right]
        dl = np.abs(y - v[left])
        dr = np.abs(y - v[right])
        lab_l, lab_r = self.labels[left], self.labels[right]
        pick_left = (dl < dr) | ((dl == dr) & (lab_l <= lab_r))
        return np.where(pick_left, lab_l, lab_r)


def ml_detect(y, h, p, rho, constellation=PAM4, mode="bob"):
    """ML estimate of the intended symbol from one observation, by enumeration.

    Same rule as :class:`Detector` but evaluated exhaustively; used for
    single observations and as a reference for the sorted search.
    """
    c = np.asarray(constellation, dtype=float)
    h = np.asarray(h, dtype=float)
    if mode == "bob":
        cost = (y - rho * np.linalg.norm(h) * c) ** 2
        return float(c[int(np.argmin(cost))])
    if mode == "eve_naive":
        cost = (y - rho * float(h @ p.w) * c) ** 2
        return float(c[int(np.argmin(cost))])
    if mode != "eve":
        raise ValueError(f"unknown detector mode {mode!r}")
    _, s_a = _noise_combos(c, p.n_tx)
    best, best_cost = 0, np.inf
    for i, s in enumerate(c):
        x = p.w[None, :] * s + s_a @ p.W_a.T / p.n_tx
        cost = float(np.min((y - rho * x @ h) ** 2))
        if cost < best_cost:
            best, best_cost = i, cost
    return float(c[best])


# --------------------------------------------------------------------------
# Monte Carlo

def _chunk_errors(args):
    (h_b, h_e, p, rho, sigma2, c, det_b, det_e, seed, chunk, n) = args
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(chunk,)))
    m = len(c)
    s_idx = rng.integers(0, m, size=n)
    other = rng.integers(0, m - 1, size=(n, p.n_tx))
    a_idx = other + (other >= s_idx[:, None])
    z = rng.normal(0.0, np.sqrt(sigma2), size=(2, n))
    x = p.w[None, :] * c[s_idx][:, None] + c[a_idx] @ p.W_a.T / p.n_tx
    y_b = rho * (x @ h_b) + z[0]
    y_e = rho * (x @ h_e) + z[1]
    err_b = int(np.count_nonzero(det_b.detect_index(y_b) != s_idx))
    err_e = int(np.count_nonzero(det_e.detect_index(y_e) != s_idx))
    return err_b, err_e


def ser_monte_carlo(h_bob, h_eve, precoder, rho, sigma2, n_trials, seed,
                    constellation=PAM4, eve_mode="eve", threads=1):
    """Symbol error rates of Bob and Eve on one shared stream of trials.

    Each trial draws the intended symbol, an artificial-noise vector over the
    other symbols and independent receiver noise. Trials are split into chunks
    of ``SER_CHUNK`` with seeds derived from ``(seed, chunk index)``, so the
    result does not depend on ``threads``.
    """
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    c = np.asarray(constellation, dtype=float)
    h_b = np.asarray(h_bob, dtype=float)
    h_e = np.asarray(h_eve, dtype=float)
    det_b = Detector(h_b, precoder, rho, c, "bob")
    det_e = Detector(h_e, precoder, rho, c, eve_mode)
    jobs = []
    for chunk, start in enumerate(range(0, n_trials, SER_CHUNK)):
        n = min(SER_CHUNK, n_trials - start)
        jobs.append((h_b, h_e, precoder, rho, sigma2, c, det_b, det_e, seed, chunk, n))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            counts = list(ex.map(_chunk_errors, jobs))
    else:
        counts = [_chunk_errors(j) for j in jobs]
    eb = sum(cnt[0] for cnt in counts)
    ee = sum(cnt[1] for cnt in counts)
    return SerResult(eb / n_trials, ee / n_trials, n_trials, seed, eb, ee)
