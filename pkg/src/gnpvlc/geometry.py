"""Indoor optical propagation: Lambertian LOS plus single-bounce wall patches.

Coordinates are metres with the room centred on the origin in x and y and
the floor at ``z = 0``. LEDs face straight down, photodiodes straight up.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = ["Scene", "ChannelPath", "los_gain", "nlos_paths", "delay_phase", "receiver_paths"]


def _default_leds():
    return ((2.2, 2.2, 4.0), (2.2, -2.2, 4.0), (-2.2, 2.2, 4.0), (-2.2, -2.2, 4.0))


@dataclass(frozen=True)
class Scene:
    """Room, LEDs and photodiode parameters.

    ``nlos_dynamic_range`` discards reflected paths weaker than that fraction
    of the strongest reflected path for the same LED/receiver pair, the way a
    ray tracer with a finite dynamic range does. Together with
    ``wall_patch_size`` it sets how many reflected paths a receiver sees.
    """

    room: tuple = (20.0, 20.0, 4.0)
    led_positions: tuple = field(default_factory=_default_leds)
    fov: float = np.pi / 2
    pd_area: float = 1e-4
    lambertian_order: float = 1.0
    wall_reflectivity: float = 0.8
    wall_patch_size: float = 1.0
    nlos_dynamic_range: float = 0.0
    wavelength: float = 550e-9

    def __post_init__(self):
        object.__setattr__(self, "room", tuple(float(v) for v in self.room))
        object.__setattr__(
            self, "led_positions", tuple(tuple(float(c) for c in p) for p in self.led_positions)
        )
        if len(self.room) != 3 or min(self.room) <= 0:
            raise ValueError("room extents must be three positive lengths")
        if not self.led_positions:
            raise ValueError("at least one LED is required")
        for p in self.led_positions:
            if len(p) != 3 or not self.contains(p):
                raise ValueError(f"LED {p} lies outside the room")
        if not 0 < self.fov <= np.pi / 2:
            raise ValueError("fov must lie in (0, pi/2]")
        if self.pd_area <= 0:
            raise ValueError("pd_area must be positive")
        if self.lambertian_order < 0:
            raise ValueError("lambertian_order must be non-negative")
        if not 0 <= self.wall_reflectivity <= 1:
            raise ValueError("wall_reflectivity must lie in [0, 1]")
        if self.wall_patch_size <= 0 or self.wavelength <= 0:
            raise ValueError("wall_patch_size and wavelength must be positive")
        if not 0 <= self.nlos_dynamic_range < 1:
            raise ValueError("nlos_dynamic_range must lie in [0, 1)")

    @property
    def n_tx(self):
        return len(self.led_positions)

    @property
    def leds(self):
        return np.array(self.led_positions)

    def contains(self, p, tol=1e-9):
        lx, ly, lz = self.room
        x, y, z = p
        return (abs(x) <= lx / 2 + tol and abs(y) <= ly / 2 + tol and -tol <= z <= lz + tol)

    @cached_property
    def wall_patches(self):
        """Patch centres, inward normals and areas, each an array over patches."""
        lx, ly, lz = self.room
        s = self.wall_patch_size
        centres, normals, areas = [], [], []
        nz = max(int(round(lz / s)), 1)
        zc = (np.arange(nz) + 0.5) * lz / nz
        # (axis along the wall, wall length, fixed coordinate, inward normal)
        walls = (
            (0, lx, (1, -ly / 2), (0.0, 1.0, 0.0)),
            (0, lx, (1, ly / 2), (0.0, -1.0, 0.0)),
            (1, ly, (0, -lx / 2), (1.0, 0.0, 0.0)),
            (1, ly, (0, lx / 2), (-1.0, 0.0, 0.0)),
        )
        for axis, length, (fixed_axis, fixed_val), normal in walls:
            nu = max(int(round(length / s)), 1)
            uc = -length / 2 + (np.arange(nu) + 0.5) * length / nu
            uu, zz = np.meshgrid(uc, zc, indexing="ij")
            c = np.zeros((uu.size, 3))
            c[:, axis] = uu.ravel()
            c[:, fixed_axis] = fixed_val
            c[:, 2] = zz.ravel()
            centres.append(c)
            normals.append(np.tile(normal, (uu.size, 1)))
            areas.append(np.full(uu.size, (length / nu) * (lz / nz)))
        return np.vstack(centres), np.vstack(normals), np.concatenate(areas)


@dataclass(frozen=True)
class ChannelPath:
    gain: float
    delay_phase: float
    path_index: int
    transmitter_index: int


_DOWN = np.array([0.0, 0.0, -1.0])
_UP = np.array([0.0, 0.0, 1.0])


def _check_points(scene, *pts):
    for p in pts:
        if len(p) != 3 or not scene.contains(p):
            raise ValueError(f"point {tuple(p)} lies outside the room")


def los_gain(scene, led, rx):
    """DC gain of the direct path from ``led`` to a photodiode at ``rx``.

    ``(m+1) A cos^m(phi) cos(psi) / (2 pi d^2)`` inside the field of view,
    exactly zero outside it.
    """
    led, rx = np.asarray(led, dtype=float), np.asarray(rx, dtype=float)
    _check_points(scene, led, rx)
    v = rx - led
    d = float(np.linalg.norm(v))
    if d == 0.0:
        raise ValueError("LED and receiver coincide")
    cos_phi = float(v @ _DOWN) / d
    cos_psi = float(-v @ _UP) / d
    if cos_phi <= 0 or cos_psi <= 0 or np.arccos(min(cos_psi, 1.0)) > scene.fov:
        return 0.0
    m = scene.lambertian_order
    return (m + 1) * scene.pd_area * cos_phi**m * cos_psi / (2 * np.pi * d * d)


def delay_phase(led, via, rx, wavelength):
    """Propagation phase ``2 pi L / wavelength`` wrapped to ``[0, 2 pi)``.

    ``via`` is the reflection point or ``None`` for the direct path.
    """
    led, rx = np.asarray(led, dtype=float), np.asarray(rx, dtype=float)
    if via is None:
        length = np.linalg.norm(rx - led)
    else:
        via = np.asarray(via, dtype=float)
        length = np.linalg.norm(via - led, axis=-1) + np.linalg.norm(rx - via, axis=-1)
    if np.any(length == 0):
        raise ValueError("path endpoints coincide")
    # split the length into whole wavelengths first to keep the phase accurate
    frac = np.mod(length / wavelength, 1.0)
    return np.mod(2 * np.pi * frac, 2 * np.pi)


def _nlos_arrays(scene, led, rx):
    """Gains and reflection points of all single-bounce paths (unfiltered)."""
    centres, normals, areas = scene.wall_patches
    if scene.wall_reflectivity == 0:
        return np.zeros(0), np.zeros((0, 3))
    v1 = centres - led
    d1 = np.linalg.norm(v1, axis=1)
    v2 = rx - centres
    d2 = np.linalg.norm(v2, axis=1)
    cos_phi1 = v1 @ _DOWN / d1
    cos_psi1 = np.einsum("ij,ij->i", -v1, normals) / d1
    cos_phi2 = np.einsum("ij,ij->i", v2, normals) / d2
    cos_psi2 = -v2 @ _UP / d2
    m = scene.lambertian_order
    ok = (cos_phi1 > 0) & (cos_psi1 > 0) & (cos_phi2 > 0) & (cos_psi2 > 0)
    ok &= np.arccos(np.clip(cos_psi2, -1, 1)) <= scene.fov
    g = np.zeros(len(centres))
    c = ok
    g[c] = (
        (m + 1) * scene.pd_area * scene.wall_reflectivity * areas[c]
        * cos_phi1[c] ** m * cos_psi1[c] * cos_phi2[c] * cos_psi2[c]
        / (2 * np.pi**2 * d1[c] ** 2 * d2[c] ** 2)
    )
    keep = g > 0
    if scene.nlos_dynamic_range > 0 and np.any(keep):
        keep &= g >= scene.nlos_dynamic_range * g.max()
    return g[keep], centres[keep]


def nlos_paths(scene, led, rx, transmitter_index=0):
    """Single-reflection paths from ``led`` to ``rx`` via the wall patches.

    Paths are numbered from 1 (0 is reserved for the LOS path) in order of
    decreasing gain.
    """
    led, rx = np.asarray(led, dtype=float), np.asarray(rx, dtype=float)
    _check_points(scene, led, rx)
    g, pts = _nlos_arrays(scene, led, rx)
    order = np.argsort(-g, kind="stable")
    g, pts = g[order], pts[order]
    phases = delay_phase(led, pts, rx, scene.wavelength) if len(g) else np.zeros(0)
    return [
        ChannelPath(float(gi), float(ph), n + 1, transmitter_index)
        for n, (gi, ph) in enumerate(zip(g, phases))
    ]


def receiver_paths(scene, rx):
    """Path gains and delay phases from every LED to ``rx`` as padded arrays.

    Returns
    -------
    gains, phases : numpy.ndarray, shape (n_tx, 1 + max N_NLOS)
        Column 0 is the LOS path; rows shorter than the longest are padded
        with zero gain.
    n_nlos : numpy.ndarray of int, shape (n_tx,)
    """
    rx = np.asarray(rx, dtype=float)
    _check_points(scene, rx)
    rows = []
    for led in scene.leds:
        g_los = los_gain(scene, led, rx)
        ph_los = delay_phase(led, None, rx, scene.wavelength)
        g, pts = _nlos_arrays(scene, led, rx)
        order = np.argsort(-g, kind="stable")
        g, pts = g[order], pts[order]
        ph = delay_phase(led, pts, rx, scene.wavelength) if len(g) else np.zeros(0)
        rows.append((np.concatenate([[g_los], g]), np.concatenate([[ph_los], ph])))
    width = max(len(r[0]) for r in rows)
    gains = np.zeros((len(rows), width))
    phases = np.zeros((len(rows), width))
    for i, (g, ph) in enumerate(rows):
        gains[i, : len(g)] = g
        phases[i, : len(ph)] = ph
    n_nlos = np.array([len(r[0]) - 1 for r in rows])
    return gains, phases, n_nlos
