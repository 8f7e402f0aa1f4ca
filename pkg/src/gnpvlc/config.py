"""Experiment configuration: defaults, YAML loading and validation.

Config files are YAML mappings. Every key is optional; anything omitted takes
the default below. Units: metres, radians, watts/amperes except where the key
name says ``_dbm``.

Example::

    seed: 7
    scheme: gnp                 # gnp | baseline
    tx_angle_policy: suboptimal # suboptimal | iterative | fixed
    tx_angles: 1.396            # used by the fixed policy (scalar or per LED)
    eve_angle: zero             # zero | bob
    p_tx_dbm: 10
    scene:
      room: [20, 20, 4]
      led_positions: [[2.2, 2.2, 4], [2.2, -2.2, 4], [-2.2, 2.2, 4], [-2.2, -2.2, 4]]
      wall_patch_size: 1.0
    eve_grid: {step: 0.5, extent: [-10, 10], height: 1.0}
"""

import dataclasses
from dataclasses import dataclass, field

import numpy as np
import yaml

from .geometry import Scene
from .gnp import BOB_RANGES, DELTA_PHI_BOUNDS, EVE_RANGES, GnpPropertyRanges

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "config_from_dict", "config_to_dict"]


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def _default_ser_eves():
    return ((1.0, 1.0, 1.0), (2.5, 2.5, 1.0), (5.0, 5.0, 1.0), (7.5, 7.5, 1.0))


def _default_fixed_eves():
    return (
        {"position": (-2.0, 0.0, 1.0), "angle": "zero"},
        {"position": (3.0, 4.0, 1.0), "angle": "bob"},
    )


@dataclass(frozen=True)
class ExperimentConfig:
    scene: Scene = field(default_factory=Scene)
    bob_position: tuple = (0.0, 0.0, 1.0)
    bob_ranges: GnpPropertyRanges = BOB_RANGES
    eve_ranges: GnpPropertyRanges = EVE_RANGES
    zeta: float = 0.44  # W/A
    eta: float = 0.54  # A/W
    i_dc: float = 3.0  # A
    noise_dbm: float = -133.8
    p_tx_dbm: float = 10.0
    scheme: str = "gnp"
    tx_angle_policy: str = "suboptimal"
    tx_angles: object = None
    eve_angle: str = "zero"
    eve_grid_step: float = 0.5
    eve_grid_extent: tuple = (-10.0, 10.0)
    eve_height: float = 1.0
    eve_count: int = 500
    bob_sweep_step: float = 0.5
    bob_sweep_eve: tuple = (-5.0, -5.0, 1.0)
    fixed_eves: tuple = field(default_factory=_default_fixed_eves)
    ser_eve_positions: tuple = field(default_factory=_default_ser_eves)
    p_tx_sweep_dbm: tuple = (10.0, 15.0, 20.0, 25.0, 30.0, 35.0)
    trials: int = 100_000
    eve_detector: str = "eve"
    iter_eps: float = 1e-9
    max_iter: int = 100
    histogram_bins: int = 20
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        _validate(self)

    @property
    def sigma2(self):
        return 10.0 ** ((self.noise_dbm - 30.0) / 10.0)

    @property
    def p_tx(self):
        return 10.0 ** ((self.p_tx_dbm - 30.0) / 10.0)

    @property
    def delta_phi_bounds(self):
        return self.eve_ranges.delta_phi_bounds

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


def _fail(name, msg):
    raise ConfigError(f"{name}: {msg}")


def _validate(c):
    for name in ("zeta", "eta", "i_dc", "eve_grid_step", "bob_sweep_step", "iter_eps"):
        if not getattr(c, name) > 0:
            _fail(name, "must be positive")
    for name in ("eve_count", "trials", "max_iter", "histogram_bins", "threads"):
        if int(getattr(c, name)) < 1:
            _fail(name, "must be at least 1")
    if c.scheme not in ("gnp", "baseline"):
        _fail("scheme", f"expected gnp or baseline, got {c.scheme!r}")
    if c.tx_angle_policy not in ("suboptimal", "iterative", "fixed"):
        _fail("tx_angle_policy", f"expected suboptimal, iterative or fixed, got {c.tx_angle_policy!r}")
    if c.tx_angle_policy == "fixed":
        if c.tx_angles is None:
            _fail("tx_angles", "required when tx_angle_policy is fixed")
        a = np.atleast_1d(np.asarray(c.tx_angles, dtype=float))
        if a.size not in (1, c.scene.n_tx):
            _fail("tx_angles", f"expected 1 or {c.scene.n_tx} values")
        if np.any(np.abs(a) > np.pi / 2):
            _fail("tx_angles", "angles must lie in [-pi/2, pi/2]")
    if c.eve_angle not in ("zero", "bob"):
        _fail("eve_angle", f"expected zero or bob, got {c.eve_angle!r}")
    if c.eve_detector not in ("eve", "eve_naive"):
        _fail("eve_detector", f"expected eve or eve_naive, got {c.eve_detector!r}")
    lo, hi = c.eve_grid_extent
    if not lo < hi:
        _fail("eve_grid_extent", "lower bound must be below upper bound")
    for name in ("bob_position", "bob_sweep_eve"):
        p = getattr(c, name)
        if len(p) != 3 or not c.scene.contains(p):
            _fail(name, f"{p} is not a point inside the room")
    for i, p in enumerate(c.ser_eve_positions):
        if len(p) != 3 or not c.scene.contains(p):
            _fail(f"ser_eve_positions[{i}]", f"{p} is not a point inside the room")
    for i, e in enumerate(c.fixed_eves):
        if len(e.get("position", ())) != 3 or not c.scene.contains(e["position"]):
            _fail(f"fixed_eves[{i}].position", "not a point inside the room")
        if e.get("angle") not in ("zero", "bob"):
            _fail(f"fixed_eves[{i}].angle", "expected zero or bob")
    half = c.scene.room[0] / 2, c.scene.room[1] / 2
    if lo < -min(half) - 1e-9 or hi > min(half) + 1e-9:
        _fail("eve_grid_extent", "grid leaves the room")
    if not 0 <= c.eve_height <= c.scene.room[2]:
        _fail("eve_height", "outside the room")
    if not c.p_tx_sweep_dbm:
        _fail("p_tx_sweep_dbm", "must not be empty")


_SCENE_KEYS = {f.name for f in dataclasses.fields(Scene)}


def _ranges(d, default, name):
    if d is None:
        return default
    try:
        return GnpPropertyRanges(
            tuple(d.get("a_l_range", default.a_l_range)),
            tuple(d.get("a_r_range", default.a_r_range)),
            tuple(d.get("delta_phi_bounds", default.delta_phi_bounds)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{name}: {exc}") from None


def config_from_dict(d):
    d = dict(d or {})
    kwargs = {}
    scene = d.pop("scene", None) or {}
    unknown = set(scene) - _SCENE_KEYS
    if unknown:
        raise ConfigError(f"scene: unknown keys {sorted(unknown)}")
    try:
        kwargs["scene"] = Scene(**scene)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"scene: {exc}") from None
    dphi = d.pop("delta_phi_bounds", None)
    bob = d.pop("bob_ranges", None)
    eve = d.pop("eve_ranges", None)
    if dphi is not None:
        bob = {**(bob or {}), "delta_phi_bounds": dphi}
        eve = {**(eve or {}), "delta_phi_bounds": dphi}
    kwargs["bob_ranges"] = _ranges(bob, BOB_RANGES, "bob_ranges")
    kwargs["eve_ranges"] = _ranges(eve, EVE_RANGES, "eve_ranges")
    grid = d.pop("eve_grid", None) or {}
    for key, target in (("step", "eve_grid_step"), ("extent", "eve_grid_extent"), ("height", "eve_height")):
        if key in grid:
            d[target] = grid[key]
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    for key, value in d.items():
        if key in ("bob_position", "bob_sweep_eve", "eve_grid_extent"):
            value = tuple(float(v) for v in value)
        elif key == "ser_eve_positions":
            value = tuple(tuple(float(c) for c in p) for p in value)
        elif key == "p_tx_sweep_dbm":
            value = tuple(float(v) for v in value)
        elif key == "fixed_eves":
            value = tuple(
                {"position": tuple(float(c) for c in e["position"]), "angle": e.get("angle", "zero")}
                for e in value
            )
        kwargs[key] = value
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path):
    with open(path) as fh:
        data = yaml.safe_load(fh)
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(data)


def _plain(v):
    if isinstance(v, (tuple, list)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {k: _plain(x) for k, x in v.items()}
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def config_to_dict(c):
    """Plain-data echo of a config, suitable for JSON or YAML."""
    out = {}
    for f in dataclasses.fields(c):
        v = getattr(c, f.name)
        if isinstance(v, Scene):
            v = {sf.name: getattr(v, sf.name) for sf in dataclasses.fields(Scene)}
        elif isinstance(v, GnpPropertyRanges):
            v = dataclasses.asdict(v)
        out[f.name] = _plain(v)
    return out
