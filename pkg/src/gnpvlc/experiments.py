"""Seeded experiment runners producing tabular results.

Every random draw is keyed by ``(config seed, stream tag, item index)``
through :class:`numpy.random.SeedSequence`, so results do not depend on the
order in which cells are evaluated or on the number of worker threads.
"""

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__
from .angles import bob_angle, tx_angles_iterative, tx_angles_suboptimal, wrap_half_pi
from .channel import PolarizerConfig, build_receiver_channel, effective_channel, geometric_channel, rho_scale
from .config import ConfigError, config_to_dict
from .metrics import achievable_rate, secrecy_rate, ser_monte_carlo, sinr
from .precoding import baseline_precoder, gnp_precoder

__all__ = [
    "SCHEMA_VERSION",
    "SweepResult",
    "Link",
    "make_link",
    "eve_effective_channel",
    "grid_axis",
    "run_heatmap",
    "run_gap_histogram",
    "run_bob_sweep",
    "run_ser",
    "run_multi_eve",
    "write_result",
]

SCHEMA_VERSION = 1

# stream tags for derived seeds
_BOB, _EVE_CELL, _EVE_RANDOM, _EVE_FIXED, _SER, _SWEEP_BOB, _SWEEP_EVE, _MULTI_CELL = range(8)


@dataclass(frozen=True)
class SweepResult:
    """Rows of one output table.

    ``columns`` carry units in brackets, ``[1]`` for dimensionless values.
    """

    name: str
    columns: tuple
    rows: tuple

    def column(self, name):
        i = self.columns.index(name)
        return np.array([r[i] for r in self.rows])

    def to_csv(self):
        lines = [f"# gnpvlc {self.name} schema={SCHEMA_VERSION}", ",".join(self.columns)]
        for r in self.rows:
            lines.append(",".join(_fmt(v) for v in r))
        return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _rng(cfg, *key):
    return np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=key))


def _map(cfg, fn, items):
    items = list(items)
    if cfg.threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            return list(ex.map(fn, items))
    return [fn(i) for i in items]


def grid_axis(lo, hi, step):
    """Points ``lo, lo + step, ...`` not exceeding ``hi``."""
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


def _eve_grid(cfg):
    ax = grid_axis(*cfg.eve_grid_extent, cfg.eve_grid_step)
    return [(float(x), float(y), cfg.eve_height) for x in ax for y in ax]


# --------------------------------------------------------------------------
# links

@dataclass(frozen=True)
class Link:
    """Transmitter side and Bob's receiver for one scheme."""

    scheme: str
    h_bob: np.ndarray
    precoder: object
    rho: float
    tx_angles: np.ndarray = None
    theta_b: float = None


def _rho(cfg, scheme, p_tx=None):
    p_tx = cfg.p_tx if p_tx is None else p_tx
    if scheme == "gnp":
        return rho_scale(cfg.eta, cfg.zeta, p_tx)
    # no polarizers: the full unpolarized intensity reaches the photodiode
    return cfg.eta * cfg.zeta * p_tx


def tx_angles_for(cfg, rc_eve=None):
    n = cfg.scene.n_tx
    if cfg.tx_angle_policy == "suboptimal":
        return tx_angles_suboptimal(cfg.delta_phi_bounds, n).theta_star
    if cfg.tx_angle_policy == "fixed":
        return np.broadcast_to(np.asarray(cfg.tx_angles, dtype=float), (n,)).copy()
    if rc_eve is None:
        raise ConfigError("tx_angle_policy: iterative needs a single eavesdropper channel")
    return tx_angles_iterative(rc_eve, cfg.iter_eps, cfg.max_iter).theta_star


def make_link(cfg, rc_bob, scheme, tx_angles=None, p_tx=None):
    rho = _rho(cfg, scheme, p_tx)
    if scheme == "baseline":
        return Link("baseline", geometric_channel(rc_bob.gains), baseline_precoder(rc_bob.gains), rho)
    tx = np.asarray(tx_angles, dtype=float)
    theta_b = bob_angle(rc_bob, tx).theta_b_star
    h_b = effective_channel(rc_bob, PolarizerConfig(tx, theta_b))
    return Link("gnp", h_b, gnp_precoder(h_b), rho, tx, theta_b)


def eve_effective_channel(link, rc_eve, eve_angle):
    if link.scheme == "baseline":
        return geometric_channel(rc_eve.gains)
    theta_e = link.theta_b if eve_angle == "bob" else 0.0
    return effective_channel(rc_eve, PolarizerConfig(link.tx_angles, theta_e))


def _rates(cfg, link, h_eves):
    s_b = sinr(link.h_bob, link.precoder, link.rho, cfg.sigma2)
    s_e = [sinr(h, link.precoder, link.rho, cfg.sigma2) for h in h_eves]
    r_b = achievable_rate(s_b)
    r_e = [achievable_rate(s) for s in s_e]
    return s_b, s_e, r_b, r_e, secrecy_rate(r_b, r_e)


def _bob_channel(cfg, position=None, key=(_BOB,)):
    pos = cfg.bob_position if position is None else position
    return build_receiver_channel(cfg.scene, pos, cfg.bob_ranges, _rng(cfg, *key), "bob")


def _eve_channel(cfg, position, key):
    return build_receiver_channel(cfg.scene, position, cfg.eve_ranges, _rng(cfg, *key), "eve")


# --------------------------------------------------------------------------
# runners

_RATE_COLUMNS = ("sinr_bob[1]", "sinr_eve[1]", "r_bob[bit/s/Hz]", "r_eve[bit/s/Hz]", "r_s[bit/s/Hz]")


def run_heatmap(cfg):
    """Secrecy rate for one eavesdropper on every grid cell.

    Columns: Eve position, Bob's polarizer angle (NaN for the baseline),
    SINRs, rates and secrecy rate.
    """
    rc_bob = _bob_channel(cfg)
    shared = None
    if cfg.scheme == "baseline":
        shared = make_link(cfg, rc_bob, "baseline")
    elif cfg.tx_angle_policy != "iterative":
        shared = make_link(cfg, rc_bob, "gnp", tx_angles_for(cfg))

    def cell(item):
        i, pos = item
        rc_eve = _eve_channel(cfg, pos, (_EVE_CELL, i))
        link = shared or make_link(cfg, rc_bob, "gnp", tx_angles_for(cfg, rc_eve))
        s_b, s_e, r_b, r_e, r_s = _rates(cfg, link, [eve_effective_channel(link, rc_eve, cfg.eve_angle)])
        theta_b = np.nan if link.theta_b is None else link.theta_b
        return (*pos, theta_b, s_b, s_e[0], r_b, r_e[0], r_s)

    rows = _map(cfg, cell, enumerate(_eve_grid(cfg)))
    cols = ("eve_x[m]", "eve_y[m]", "eve_z[m]", "theta_b[rad]") + _RATE_COLUMNS
    return SweepResult(f"heatmap_{cfg.scheme}", cols, tuple(rows))


def _random_position(cfg, rng):
    lo, hi = cfg.eve_grid_extent
    x, y = rng.uniform(lo, hi, size=2)
    return (float(x), float(y), cfg.eve_height)


def run_gap_histogram(cfg):
    """Suboptimal against iterative transmitter angles over random Eves.

    Returns ``(samples, histogram)``. ``samples`` holds, per placement, both
    secrecy rates, their difference (iterative minus suboptimal) and the mean
    and maximum per-LED angle difference; ``histogram`` bins the difference.
    """
    rc_bob = _bob_channel(cfg)
    theta_sub = tx_angles_suboptimal(cfg.delta_phi_bounds, cfg.scene.n_tx).theta_star
    link_sub = make_link(cfg, rc_bob, "gnp", theta_sub)

    def sample(i):
        rng = _rng(cfg, _EVE_RANDOM, i)
        pos = _random_position(cfg, rng)
        rc_eve = build_receiver_channel(cfg.scene, pos, cfg.eve_ranges, rng, "eve")
        theta_opt = tx_angles_iterative(rc_eve, cfg.iter_eps, cfg.max_iter).theta_star
        link_opt = make_link(cfg, rc_bob, "gnp", theta_opt)
        r_sub = _rates(cfg, link_sub, [eve_effective_channel(link_sub, rc_eve, cfg.eve_angle)])[4]
        r_opt = _rates(cfg, link_opt, [eve_effective_channel(link_opt, rc_eve, cfg.eve_angle)])[4]
        diff = np.degrees(np.abs(wrap_half_pi(theta_opt - theta_sub)))
        return (*pos, r_sub, r_opt, r_opt - r_sub, float(diff.mean()), float(diff.max()))

    rows = _map(cfg, sample, range(cfg.eve_count))
    cols = (
        "eve_x[m]", "eve_y[m]", "eve_z[m]", "r_s_sub[bit/s/Hz]", "r_s_opt[bit/s/Hz]",
        "gap[bit/s/Hz]", "angle_diff_mean[deg]", "angle_diff_max[deg]",
    )
    samples = SweepResult("gap_samples", cols, tuple(rows))
    counts, edges = np.histogram(samples.column("gap[bit/s/Hz]"), bins=cfg.histogram_bins)
    hist = tuple((edges[k], edges[k + 1], int(counts[k])) for k in range(len(counts)))
    histogram = SweepResult("gap_histogram", ("bin_lo[bit/s/Hz]", "bin_hi[bit/s/Hz]", "count[1]"), hist)
    return samples, histogram


def run_bob_sweep(cfg):
    """Secrecy rate along ``(x, 0, z_Bob)`` with one fixed eavesdropper.

    The four GNP columns combine suboptimal or iterative transmitter angles
    (with Bob's angle re-derived for each) with Eve's polarizer at 0 or at
    Bob's angle. The last column is the baseline scheme; ``r_bob_sub`` is
    Bob's own rate under the suboptimal angles.
    """
    rc_eve = _eve_channel(cfg, cfg.bob_sweep_eve, (_SWEEP_EVE, 0))
    theta_sub = tx_angles_suboptimal(cfg.delta_phi_bounds, cfg.scene.n_tx).theta_star
    theta_opt = tx_angles_iterative(rc_eve, cfg.iter_eps, cfg.max_iter).theta_star
    xs = grid_axis(*cfg.eve_grid_extent, cfg.bob_sweep_step)
    z = cfg.bob_position[2]

    def point(item):
        i, x = item
        rc_bob = _bob_channel(cfg, (float(x), 0.0, z), (_SWEEP_BOB, i))
        r_s = []
        for tx in (theta_sub, theta_opt):
            link = make_link(cfg, rc_bob, "gnp", tx)
            for mode in ("zero", "bob"):
                _, _, r_b, _, rs = _rates(cfg, link, [eve_effective_channel(link, rc_eve, mode)])
                r_s.append(rs)
            if tx is theta_sub:
                r_b_sub = r_b
        base = make_link(cfg, rc_bob, "baseline")
        r_s.append(_rates(cfg, base, [eve_effective_channel(base, rc_eve, "zero")])[4])
        return (float(x), 0.0, z, r_b_sub, *r_s)

    rows = _map(cfg, point, enumerate(xs))
    cols = (
        "bob_x[m]", "bob_y[m]", "bob_z[m]", "r_bob_sub[bit/s/Hz]",
        "r_s_sub_eve0[bit/s/Hz]", "r_s_sub_evebob[bit/s/Hz]",
        "r_s_opt_eve0[bit/s/Hz]", "r_s_opt_evebob[bit/s/Hz]",
        "r_s_baseline[bit/s/Hz]",
    )
    return SweepResult("bob_sweep", cols, tuple(rows))


def run_ser(cfg):
    """Bob and Eve symbol error rates against transmit power, both schemes.

    For one Eve location all powers and both schemes share the same Monte
    Carlo stream.
    """
    rc_bob = _bob_channel(cfg)
    jobs = []
    for k, pos in enumerate(cfg.ser_eve_positions):
        for p_dbm in cfg.p_tx_sweep_dbm:
            for scheme in ("gnp", "baseline"):
                jobs.append((k, pos, p_dbm, scheme))
    eves = [_eve_channel(cfg, pos, (_EVE_FIXED, 100 + k)) for k, pos in enumerate(cfg.ser_eve_positions)]

    def job(item):
        k, pos, p_dbm, scheme = item
        p_tx = 10.0 ** ((p_dbm - 30.0) / 10.0)
        rc_eve = eves[k]
        tx = None if scheme == "baseline" else tx_angles_for(cfg, rc_eve)
        link = make_link(cfg, rc_bob, scheme, tx, p_tx)
        h_e = eve_effective_channel(link, rc_eve, cfg.eve_angle)
        seed = int(np.random.SeedSequence(cfg.seed, spawn_key=(_SER, k)).generate_state(1, np.uint64)[0])
        res = ser_monte_carlo(
            link.h_bob, h_e, link.precoder, link.rho, cfg.sigma2, cfg.trials, seed,
            eve_mode=cfg.eve_detector,
        )
        return (*pos, p_dbm, scheme, res.ser_bob, res.ser_eve, res.n_trials)

    rows = _map(cfg, job, jobs)
    cols = ("eve_x[m]", "eve_y[m]", "eve_z[m]", "p_tx[dBm]", "scheme", "ser_bob[1]", "ser_eve[1]", "trials[1]")
    return SweepResult("ser", cols, tuple(rows))


def run_multi_eve(cfg):
    """Secrecy rate with the configured fixed eavesdroppers plus one on each grid cell.

    The roaming eavesdropper keeps its polarizer at 0; the fixed ones use the
    angle given in ``fixed_eves``.
    """
    if cfg.scheme == "gnp" and cfg.tx_angle_policy == "iterative":
        raise ConfigError("tx_angle_policy: iterative is defined for a single eavesdropper")
    rc_bob = _bob_channel(cfg)
    tx = None if cfg.scheme == "baseline" else tx_angles_for(cfg)
    link = make_link(cfg, rc_bob, cfg.scheme, tx)
    fixed = []
    for k, e in enumerate(cfg.fixed_eves):
        rc = _eve_channel(cfg, e["position"], (_EVE_FIXED, k))
        fixed.append(eve_effective_channel(link, rc, e["angle"]))

    def cell(item):
        i, pos = item
        rc_eve = _eve_channel(cfg, pos, (_MULTI_CELL, i))
        h_eves = fixed + [eve_effective_channel(link, rc_eve, "zero")]
        _, _, r_b, r_e, r_s = _rates(cfg, link, h_eves)
        return (*pos, r_b, max(r_e), r_s)

    rows = _map(cfg, cell, enumerate(_eve_grid(cfg)))
    cols = ("eve_x[m]", "eve_y[m]", "eve_z[m]", "r_bob[bit/s/Hz]", "r_eve_max[bit/s/Hz]", "r_s[bit/s/Hz]")
    return SweepResult(f"multi_eve_{cfg.scheme}", cols, tuple(rows))


# --------------------------------------------------------------------------
# output

def write_result(result, out_dir, cfg, command):
    """Write ``<name>.csv`` and ``<name>.manifest.json``; return both paths."""
    os.makedirs(out_dir, exist_ok=True)
    text = result.to_csv()
    data = text.encode()
    csv_path = os.path.join(out_dir, f"{result.name}.csv")
    with open(csv_path, "wb") as fh:
        fh.write(data)
    manifest = {
        "command": command,
        "output": os.path.basename(csv_path),
        "schema_version": SCHEMA_VERSION,
        "gnpvlc_version": __version__,
        "seed": cfg.seed,
        "rows": len(result.rows),
        "columns": list(result.columns),
        "sha256": hashlib.sha256(data).hexdigest(),
        "config": config_to_dict(cfg),
    }
    man_path = os.path.join(out_dir, f"{result.name}.manifest.json")
    with open(man_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return csv_path, man_path


def _json_default(v):
    if isinstance(v, float) and not np.isfinite(v):
        return str(v)
    raise TypeError(f"not JSON serializable: {type(v).__name__}")
