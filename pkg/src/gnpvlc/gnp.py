"""Chiroptical response of a gold-nanoparticle (GNP) plate.

A plate acts on circularly polarized light as ``diag(sqrt(a_L), sqrt(a_R) e^{j dphi})``
where ``a_L``, ``a_R`` are transmittances (one minus the absorption factor)
and ``dphi`` is the retardation of RCP relative to LCP.
"""

import csv
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GnpPathResponse",
    "GnpPropertyRanges",
    "PlateGeometry",
    "BOB_RANGES",
    "EVE_RANGES",
    "DELTA_PHI_BOUNDS",
    "DEFAULT_GOLD_PRICE_USD_PER_G",
    "plate_matrix",
    "extract_properties",
    "sample_path_response",
    "sample_responses",
    "asymmetry",
    "plate_cost",
    "load_path_responses",
]

# minimum |a_L - a_R| for a plate to count as chiral
CHIRAL_MARGIN = 1e-6

DELTA_PHI_BOUNDS = (0.6144, 0.8308)


@dataclass(frozen=True)
class GnpPathResponse:
    """Transmittances and retardation difference for one or many paths.

    Fields may be scalars or equally shaped arrays (one entry per path).
    """

    a_bar_l: np.ndarray
    a_bar_r: np.ndarray
    delta_phi: np.ndarray

    def __post_init__(self):
        for name in ("a_bar_l", "a_bar_r"):
            v = np.asarray(getattr(self, name), dtype=float)
            if np.any(v < 0) or np.any(v > 1) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must lie in [0, 1]")
        if not np.all(np.isfinite(self.delta_phi)):
            raise ValueError("delta_phi must be finite")


@dataclass(frozen=True)
class GnpPropertyRanges:
    """Sampling intervals for absorption factors and retardation difference."""

    a_l_range: tuple
    a_r_range: tuple
    delta_phi_bounds: tuple = DELTA_PHI_BOUNDS

    def __post_init__(self):
        for name in ("a_l_range", "a_r_range"):
            lo, hi = getattr(self, name)
            if not (0.0 <= lo <= hi <= 1.0):
                raise ValueError(f"{name}={getattr(self, name)} must be an interval inside [0, 1]")
        lo, hi = self.delta_phi_bounds
        if not lo <= hi:
            raise ValueError("delta_phi_bounds must satisfy lower <= upper")


BOB_RANGES = GnpPropertyRanges((0.10, 0.11), (0.25, 0.26))
EVE_RANGES = GnpPropertyRanges((0.10, 0.40), (0.25, 0.75))


def plate_matrix(r):
    """Circular-basis Jones matrix of the plate for a single path."""
    return np.array(
        [
            [np.sqrt(r.a_bar_l), 0.0],
            [0.0, np.sqrt(r.a_bar_r) * np.exp(1j * r.delta_phi)],
        ],
        dtype=complex,
    )


def extract_properties(e_l, e_r):
    """Recover the plate response from measured output amplitudes.

    ``(e_l, e_r)`` are the LCP/RCP amplitudes measured when the plate is lit
    with the unit-amplitude input ``(1, 1)`` in the circular basis (x-polarized
    light up to a factor of sqrt(2)).
    """
    if abs(e_l) == 0 or abs(e_r) == 0:
        raise ValueError("zero output amplitude: total absorption is outside the plate model")
    if abs(e_l) > 1 + 1e-12 or abs(e_r) > 1 + 1e-12:
        raise ValueError("output amplitude exceeds the input amplitude")
    dphi = np.angle(e_r) - np.angle(e_l)
    # wrap into (-pi, pi]
    dphi = -((-dphi + np.pi) % (2 * np.pi) - np.pi)
    return GnpPathResponse(
        min(abs(e_l) ** 2, 1.0), min(abs(e_r) ** 2, 1.0), float(dphi)
    )


def sample_responses(ranges, rng, shape=()):
    """Draw i.i.d. path responses of the given ``shape``.

    Absorption factors are drawn uniformly from the configured intervals and
    converted to transmittances. Draws with ``|a_L - a_R| < CHIRAL_MARGIN``
    are redrawn, so every path is strictly chiral.
    """
    (ll, lh), (rl, rh) = ranges.a_l_range, ranges.a_r_range
    if max(lh, rh) - min(ll, rl) < CHIRAL_MARGIN:
        raise ValueError("absorption ranges leave no room for a chiral response")
    a_l = np.atleast_1d(rng.uniform(ll, lh, size=shape))
    a_r = np.atleast_1d(rng.uniform(rl, rh, size=shape))
    dphi = rng.uniform(*ranges.delta_phi_bounds, size=shape)
    bad = np.abs(a_l - a_r) < CHIRAL_MARGIN
    while np.any(bad):
        k = int(np.count_nonzero(bad))
        a_l[bad] = rng.uniform(ll, lh, size=k)
        a_r[bad] = rng.uniform(rl, rh, size=k)
        bad = np.abs(a_l - a_r) < CHIRAL_MARGIN
    a_l = a_l.reshape(shape)
    a_r = a_r.reshape(shape)
    return GnpPathResponse(1.0 - a_l, 1.0 - a_r, dphi)


def sample_path_response(ranges, rng):
    """Draw a single path response."""
    r = sample_responses(ranges, rng)
    return GnpPathResponse(float(r.a_bar_l), float(r.a_bar_r), float(r.delta_phi))


def asymmetry(a_bar_l, a_bar_r):
    """``sqrt(a_L/a_R) + sqrt(a_R/a_L)``; strictly above 2 for chiral paths."""
    a_bar_l = np.asarray(a_bar_l, dtype=float)
    a_bar_r = np.asarray(a_bar_r, dtype=float)
    return np.sqrt(a_bar_l / a_bar_r) + np.sqrt(a_bar_r / a_bar_l)


# --------------------------------------------------------------------------
# plate cost

GOLD_DENSITY = 19300.0  # kg/m^3
# late-2022 spot price, roughly 1630 USD per troy ounce
DEFAULT_GOLD_PRICE_USD_PER_G = 52.5


@dataclass(frozen=True)
class PlateGeometry:
    plate_area: float = 1e-4  # m^2
    hexagon_area: float = 12 * np.sqrt(3) * 1e-14  # m^2
    gnps_per_hexagon: int = 3
    gnp_volume: float = (200e-9) ** 3  # m^3
    gold_density: float = GOLD_DENSITY
    gold_price: float = DEFAULT_GOLD_PRICE_USD_PER_G  # currency per gram

    def __post_init__(self):
        for name in ("plate_area", "hexagon_area", "gnp_volume", "gold_density", "gold_price"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.gnps_per_hexagon < 0:
            raise ValueError("gnps_per_hexagon must be non-negative")


def plate_cost(g):
    """Material cost of the gold in one plate, in the currency of ``gold_price``."""
    v_tot = g.plate_area / g.hexagon_area * g.gnps_per_hexagon * g.gnp_volume
    grams = v_tot * g.gold_density * 1000.0
    return grams * g.gold_price


# --------------------------------------------------------------------------
# measured tables

def load_path_responses(path, n_tx=None):
    """Read measured per-path responses from a CSV file.

    Expected columns: ``transmitter, path, a_bar_l, a_bar_r, delta_phi``
    (indices zero-based, ``path`` 0 being the LOS path, ``delta_phi`` in rad).

    Returns
    -------
    dict
        ``(transmitter, path) -> GnpPathResponse``.
    """
    table = {}
    with open(path, newline="") as fh:
        rows = csv.DictReader(row for row in fh if not row.lstrip().startswith("#"))
        missing = {"transmitter", "path", "a_bar_l", "a_bar_r", "delta_phi"} - set(rows.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        for row in rows:
            key = (int(row["transmitter"]), int(row["path"]))
            if n_tx is not None and not 0 <= key[0] < n_tx:
                raise ValueError(f"{path}: transmitter index {key[0]} out of range")
            if key in table:
                raise ValueError(f"{path}: duplicate entry for {key}")
            table[key] = GnpPathResponse(
                float(row["a_bar_l"]), float(row["a_bar_r"]), float(row["delta_phi"])
            )
    return table
