"""Excitation-profile scans and width extraction.

The steady Rydberg population around the vortex core forms a sub-wavelength
peak. Scans sample it transversely (through the core at the standing-wave
node z = 3 lambda_c/4), longitudinally (along the axis), or on a full 3D
grid; widths come from half-maximum crossings refined by bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import linewidth_from, sigma_rr_steady
from .config import STANDING_WAVE, TWO_PI, Position, SystemConfig, with_winding
from .fields import control_envelope
from .meanfield import MASK_LOCAL, QuadratureSpec, calibrated_offset, shift_at

MODE_NONE = "none"  # s = 0, exact two-photon resonance everywhere
MODE_PARTIAL = "partial"  # fixed detuning compensates the core shift s(0) only
MODE_PERFECT = "perfect"  # detuning tracks s(r) pointwise
_MODES = (MODE_NONE, MODE_PARTIAL, MODE_PERFECT)

OFFSET_CALIBRATED = "calibrated"  # delta - Delta_c0 = s_0
OFFSET_DETUNED = "detuned"  # delta - Delta_c0 = 2 s_0

HALF_MAX = 0.5

# shift_at results keyed by everything they depend on; the quadrature is
# deterministic, so reuse across scans and modes is safe.
_SHIFT_CACHE: dict[tuple, float] = {}


@dataclass(frozen=True)
class ScanProfile:
    """One 1D profile of the steady excitation with its extracted width."""

    axis: str  # "r", "x" or "z"
    mode: str
    coords: np.ndarray  # um
    sigma: np.ndarray
    fwhm: float | None  # um
    peak: float
    peak_coord: float  # um
    lambda_c: float
    config_fingerprint: str
    s0: float | None = None  # rad/us
    delta_offset: float | None = None  # delta - Delta_c0, rad/us


@dataclass(frozen=True)
class Map3D:
    """Steady excitation on a regular 3D grid with a half-maximum iso level."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    field: np.ndarray  # shape (nx, ny, nz)
    mode: str
    s0: float
    delta_offset: float
    lambda_c: float
    config_fingerprint: str
    iso_level: float = HALF_MAX


def _cached_shift(
    pos: Position,
    config: SystemConfig,
    quad: QuadratureSpec,
    mask: str,
    threads: int,
    tail_tol: float,
) -> float:
    key = (
        config.fingerprint(),
        quad.extent_r,
        quad.extent_z,
        quad.spacing_r,
        quad.spacing_z,
        mask,
        tail_tol,
        pos.r,
        pos.z,
    )
    if key not in _SHIFT_CACHE:
        _SHIFT_CACHE[key] = shift_at(
            pos, config, quad=quad, mask=mask, threads=threads, tail_tol=tail_tol
        )
    return _SHIFT_CACHE[key]


def _bisect_to(fn, lo: float, hi: float, xtol: float) -> float:
    """Root of fn between lo and hi (opposite signs assumed) to width xtol."""
    f_lo = fn(lo)
    for _ in range(200):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if (fn(mid) > 0.0) == (f_lo > 0.0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def transverse_scan(
    config: SystemConfig,
    mode: str = MODE_NONE,
    r_max: float | None = None,
    n_samples: int = 201,
    quad: QuadratureSpec | None = None,
    mask: str = MASK_LOCAL,
    threads: int = 1,
    tail_tol: float = 0.01,
) -> ScanProfile:
    """Radial profile sigma_rr(r) through the core at z = 3 lambda_c/4.

    Modes: 'none' ignores the interaction shift; 'partial' holds the
    two-photon detuning at the core value s(0); 'perfect' tracks s(r)
    pointwise (which restores the mode-'none' profile). The width is twice
    the first half-maximum crossing, refined by bisection on the continuous
    profile to 1e-4 lambda_c.
    """
    if mode not in _MODES:
        raise ValueError(f"unknown antiblockade mode '{mode}'")
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    beam = config.beam
    if r_max is None:
        r_max = 1.5 * beam.waist_w0
    if r_max <= 0:
        raise ValueError("r_max must be positive")

    ip = config.probe.omega_p0 ** 2
    dp = config.probe.delta_p
    gamma = config.medium.gamma
    lambda_c = beam.wavelength_c
    z_loc = 0.75 * lambda_c
    r = np.linspace(0.0, r_max, n_samples)

    s0 = None
    if mode == MODE_PARTIAL:
        if quad is None:
            quad = QuadratureSpec.fast(lambda_c)

        def s_of(radius: float) -> float:
            return _cached_shift(
                Position(r=float(radius), phi=0.0, z=z_loc), config, quad, mask, threads, tail_tol
            )

        s_grid = np.array([s_of(rj) for rj in r])
        s0 = float(s_grid[0])
        two_photon = dp + (s0 - s_grid)

        def sigma_of(radius: float) -> float:
            env = control_envelope(radius, beam)
            return float(sigma_rr_steady(ip, env * env, dp, dp + (s0 - s_of(radius)), gamma))

    else:
        # 'perfect' tracking cancels s exactly, so both remaining modes reduce
        # to the unshifted two-photon resonance profile.
        two_photon = dp

        def sigma_of(radius: float) -> float:
            env = control_envelope(radius, beam)
            return float(sigma_rr_steady(ip, env * env, dp, dp, gamma))

    env = control_envelope(r, beam)
    sigma = sigma_rr_steady(ip, env * env, dp, two_photon, gamma)

    below = np.nonzero(sigma < HALF_MAX)[0]
    if below.size == 0:
        raise ValueError(
            f"no crossing of the half maximum within r_max={r_max:g} um; widen the scan"
        )
    i = int(below[0])
    if i == 0:
        raise ValueError("profile starts below the half maximum; no crossing at the core")
    crossing = _bisect_to(lambda radius: sigma_of(radius) - HALF_MAX, r[i - 1], r[i], 1e-4 * lambda_c)

    return ScanProfile(
        axis="r",
        mode=mode,
        coords=r,
        sigma=np.asarray(sigma, dtype=float),
        fwhm=2.0 * crossing,
        peak=float(sigma.max()),
        peak_coord=float(r[int(np.argmax(sigma))]),
        lambda_c=lambda_c,
        config_fingerprint=config.fingerprint(),
        s0=s0,
    )


def oam_broadening_scan(
    config: SystemConfig,
    l_values=(1, 2, 3, 4, 5),
    r_max: float | None = None,
    n_samples: int = 201,
) -> list[tuple[int, float]]:
    """Unshifted transverse FWHM for each orbital winding number."""
    results = []
    for l in l_values:
        if int(l) != l or l < 1:
            raise ValueError("winding numbers must be positive integers")
        profile = transverse_scan(
            with_winding(config, int(l)), mode=MODE_NONE, r_max=r_max, n_samples=n_samples
        )
        results.append((int(l), float(profile.fwhm)))
    return results


def analytic_a_r(kappa: float, w0: float = 1.0) -> float:
    """Transverse half-maximum width W0*sqrt(1 - sqrt(kappa^2 - 8)/kappa) for |l| = 1."""
    if w0 <= 0:
        raise ValueError("waist must be positive")
    if kappa < 2.0 * math.sqrt(2.0):
        raise ValueError("kappa must be at least 2*sqrt(2) for a half-maximum crossing to exist")
    return w0 * math.sqrt(1.0 - math.sqrt(kappa * kappa - 8.0) / kappa)


def analytic_a_z(w: float, delta_c0: float, lambda_c: float) -> float:
    """Longitudinal half-maximum width (1/2 - arcsin(1 - w/Delta_c0)/pi) * lambda_c."""
    if lambda_c <= 0:
        raise ValueError("wavelength must be positive")
    if delta_c0 <= 0:
        raise ValueError("modulation depth delta_c0 must be positive")
    if not 0.0 < w <= 2.0 * delta_c0:
        raise ValueError("linewidth w must lie in (0, 2*delta_c0] for a crossing to exist")
    return (0.5 - math.asin(1.0 - w / delta_c0) / math.pi) * lambda_c


def _resolve_offsets(
    config: SystemConfig,
    s0: float | None,
    delta_offset: float | None,
    quad: QuadratureSpec | None,
    mask: str,
    threads: int,
    tail_tol: float,
) -> tuple[float, float, QuadratureSpec]:
    if config.detuning.mode != STANDING_WAVE:
        raise ValueError("standing-wave detuning mode required")
    if quad is None:
        quad = QuadratureSpec.fast(config.beam.wavelength_c)
    if s0 is None:
        s0, _ = calibrated_offset(config, quad=quad, mask=mask, threads=threads, tail_tol=tail_tol)
    if delta_offset is None:
        delta_offset = s0
    return float(s0), float(delta_offset), quad


def longitudinal_scan(
    config: SystemConfig,
    z_range: tuple[float, float] | None = None,
    n_samples: int = 401,
    s0: float | None = None,
    delta_offset: float | None = None,
    quad: QuadratureSpec | None = None,
    mask: str = MASK_LOCAL,
    threads: int = 1,
    tail_tol: float = 0.01,
) -> ScanProfile:
    """Axial profile sigma_rr(z) at r = 0 with the core shift frozen at s_0.

    The detuning offset defaults to the calibrated value delta - Delta_c0 =
    s_0, which pins the peak to the standing-wave node; pass `delta_offset`
    to detune deliberately.
    """
    if n_samples < 100:
        raise ValueError("n_samples must be at least 100")
    s0, delta_offset, quad = _resolve_offsets(config, s0, delta_offset, quad, mask, threads, tail_tol)
    mod = config.detuning
    lambda_c = config.beam.wavelength_c
    if z_range is None:
        z_range = (0.75 * lambda_c - 0.5 * mod.period, 0.75 * lambda_c + 0.5 * mod.period)
    z0, z1 = z_range
    if not z1 > z0:
        raise ValueError("z_range must be increasing")

    ip = config.probe.omega_p0 ** 2
    dp = config.probe.delta_p
    gamma = config.medium.gamma
    mismatch0 = delta_offset - s0  # exactly 0.0 at the calibrated point

    def two_photon_of(z):
        return dp + mod.delta_c0 * (np.sin(TWO_PI * np.asarray(z) / mod.period) + 1.0) + mismatch0

    def sigma_of(z: float) -> float:
        return float(sigma_rr_steady(ip, 0.0, dp, two_photon_of(z), gamma))

    z = np.linspace(z0, z1, n_samples)
    sigma = np.asarray(sigma_rr_steady(ip, 0.0, dp, two_photon_of(z), gamma), dtype=float)

    peak_i = int(np.argmax(sigma))
    if sigma[peak_i] < HALF_MAX:
        raise ValueError("profile never reaches the half maximum")
    xtol = 1e-4 * lambda_c
    right_i = peak_i
    while right_i + 1 < n_samples and sigma[right_i + 1] >= HALF_MAX:
        right_i += 1
    left_i = peak_i
    while left_i - 1 >= 0 and sigma[left_i - 1] >= HALF_MAX:
        left_i -= 1
    if right_i + 1 >= n_samples or left_i == 0:
        raise ValueError("no crossing of the half maximum inside the window; widen z_range")
    right = _bisect_to(lambda zz: sigma_of(zz) - HALF_MAX, z[right_i], z[right_i + 1], xtol)
    left = _bisect_to(lambda zz: sigma_of(zz) - HALF_MAX, z[left_i - 1], z[left_i], xtol)

    return ScanProfile(
        axis="z",
        mode=OFFSET_CALIBRATED if delta_offset == s0 else OFFSET_DETUNED,
        coords=z,
        sigma=sigma,
        fwhm=right - left,
        peak=float(sigma[peak_i]),
        peak_coord=float(z[peak_i]),
        lambda_c=lambda_c,
        config_fingerprint=config.fingerprint(),
        s0=s0,
        delta_offset=delta_offset,
    )


def default_map_extents(config: SystemConfig) -> tuple[float, float]:
    """(transverse half-extent, longitudinal half-extent) framing the peak.

    Three analytic widths on each side keep the half-maximum region well
    inside the window while a 101-per-axis grid still resolves it; the
    longitudinal window never exceeds one modulation period.
    """
    beam = config.beam
    try:
        half = 3.0 * analytic_a_r(config.kappa, beam.waist_w0)
    except ValueError:
        half = 1.5 * beam.waist_w0
    ip = config.probe.omega_p0 ** 2
    w_core = float(linewidth_from(ip, 0.0, config.probe.delta_p, config.medium.gamma))
    try:
        z_half = 3.0 * analytic_a_z(w_core, config.detuning.delta_c0, beam.wavelength_c)
    except ValueError:
        z_half = 0.5 * config.detuning.period
    z_half = min(z_half, 0.5 * config.detuning.period)
    return half, z_half


def map3d(
    config: SystemConfig,
    extents: tuple[tuple[float, float], tuple[float, float], tuple[float, float]] | None = None,
    spacing: float | tuple[float, float, float] | None = None,
    delta_offset_mode: str = OFFSET_CALIBRATED,
    s0: float | None = None,
    quad: QuadratureSpec | None = None,
    mask: str = MASK_LOCAL,
    threads: int = 1,
    tail_tol: float = 0.01,
    per_voxel_exact: bool = False,
) -> Map3D:
    """Steady excitation on a 3D cartesian grid around the localized point.

    The calibrated mode sets delta - Delta_c0 = s_0 (peak pinned to the
    node); the detuned mode doubles the offset, which suppresses and widens
    the peak. By default the shift is frozen at s_0 over the whole grid;
    `per_voxel_exact` re-evaluates the quadrature per voxel and is only
    permitted on small grids.
    """
    if delta_offset_mode not in (OFFSET_CALIBRATED, OFFSET_DETUNED):
        raise ValueError(f"unknown delta offset mode '{delta_offset_mode}'")
    s0, _, quad = _resolve_offsets(config, s0, None, quad, mask, threads, tail_tol)
    offset = s0 if delta_offset_mode == OFFSET_CALIBRATED else 2.0 * s0

    beam = config.beam
    mod = config.detuning
    lambda_c = beam.wavelength_c
    if extents is None:
        half, z_half = default_map_extents(config)
        extents = (
            (-half, half),
            (-half, half),
            (0.75 * lambda_c - z_half, 0.75 * lambda_c + z_half),
        )
    if spacing is None:
        spacing = tuple((hi - lo) / 100.0 for lo, hi in extents)
    elif np.ndim(spacing) == 0:
        spacing = (float(spacing),) * 3

    axes = []
    for (lo, hi), step in zip(extents, spacing):
        if not (hi > lo and step > 0):
            raise ValueError("extents must be increasing and spacing positive")
        n = int(round((hi - lo) / step)) + 1
        axes.append(lo + step * np.arange(n))
    x, y, z = axes

    ip = config.probe.omega_p0 ** 2
    dp = config.probe.delta_p
    gamma = config.medium.gamma

    r_xy = np.hypot(x[:, None], y[None, :])
    env = control_envelope(r_xy, beam)
    ic_xy = env * env
    mismatch0 = offset - s0
    tp_z = dp + mod.delta_c0 * (np.sin(TWO_PI * z / mod.period) + 1.0) + mismatch0

    if per_voxel_exact:
        n_vox = x.size * y.size * z.size
        if n_vox > 5000:
            raise ValueError(
                f"per-voxel shift evaluation on {n_vox} voxels is impractical; "
                "coarsen the grid or use the frozen-s0 mode"
            )
        field_grid = np.empty((x.size, y.size, z.size))
        for k, zk in enumerate(z):
            tp_base = tp_z[k] + s0  # undo the frozen shift, re-subtract per voxel
            for i in range(x.size):
                for j in range(y.size):
                    s_here = _cached_shift(
                        Position(r=float(r_xy[i, j]), phi=0.0, z=float(zk)),
                        config,
                        quad,
                        mask,
                        threads,
                        tail_tol,
                    )
                    field_grid[i, j, k] = sigma_rr_steady(
                        ip, ic_xy[i, j], dp, tp_base - s_here, gamma
                    )
    else:
        field_grid = np.asarray(
            sigma_rr_steady(ip, ic_xy[:, :, None], dp, tp_z[None, None, :], gamma), dtype=float
        )

    _check_resolved(field_grid)

    return Map3D(
        x=x,
        y=y,
        z=z,
        field=field_grid,
        mode=delta_offset_mode,
        s0=s0,
        delta_offset=offset,
        lambda_c=lambda_c,
        config_fingerprint=config.fingerprint(),
    )


def _check_resolved(field_grid, min_samples: int = 4) -> None:
    """Reject grids that cannot resolve the peak's half-maximum width."""
    peak = np.unravel_index(int(np.argmax(field_grid)), field_grid.shape)
    half = HALF_MAX * float(field_grid.max())
    names = ("x", "y", "z")
    for axis in range(3):
        index = list(peak)
        index[axis] = slice(None)
        line = field_grid[tuple(index)]
        above = line >= half
        i = peak[axis]
        count = 1
        j = i
        while j - 1 >= 0 and above[j - 1]:
            j -= 1
            count += 1
        j = i
        while j + 1 < line.size and above[j + 1]:
            j += 1
            count += 1
        if count < min_samples:
            raise RuntimeError(
                f"grid too coarse along {names[axis]}: {count} samples across the "
                f"half-maximum width (need at least {min_samples}); refine the spacing"
            )


def iso_extents(volume: Map3D) -> dict[str, tuple[float, float] | None]:
    """Bounding interval of the iso-level region along each axis, or None if absent.

    Uses the maximum projection onto each axis, whose level crossings bound
    the iso surface; crossing positions are linearly interpolated between
    grid planes.
    """
    out: dict[str, tuple[float, float] | None] = {}
    for name, coords, axis_pair in (
        ("x", volume.x, (1, 2)),
        ("y", volume.y, (0, 2)),
        ("z", volume.z, (0, 1)),
    ):
        profile = volume.field.max(axis=axis_pair)
        out[name] = _level_interval(coords, profile, volume.iso_level)
    return out


def _level_interval(coords: np.ndarray, profile: np.ndarray, level: float):
    above = np.nonzero(profile >= level)[0]
    if above.size == 0:
        return None
    i0, i1 = int(above[0]), int(above[-1])
    if i0 == 0:
        lo = float(coords[0])
    else:
        lo = _interp_crossing(coords[i0 - 1], coords[i0], profile[i0 - 1], profile[i0], level)
    if i1 == profile.size - 1:
        hi = float(coords[-1])
    else:
        hi = _interp_crossing(coords[i1], coords[i1 + 1], profile[i1], profile[i1 + 1], level)
    return (lo, hi)


def _interp_crossing(x0: float, x1: float, v0: float, v1: float, level: float) -> float:
    return float(x0 + (level - v0) / (v1 - v0) * (x1 - x0))


def extract_fwhm(coords, values, lambda_c: float) -> float:
    """Full width at half maximum of one sampled peak, to 1e-4 lambda_c.

    The samples must hold a single contiguous region at or above 0.5 with
    both crossings interior to the window; the crossing positions are found
    by bisecting the piecewise-linear interpolant.
    """
    coords = np.asarray(coords, dtype=float)
    values = np.asarray(values, dtype=float)
    if coords.ndim != 1 or coords.shape != values.shape or coords.size < 3:
        raise ValueError("coords and values must be equal-length 1D arrays of at least 3 samples")
    if not np.all(np.diff(coords) > 0):
        raise ValueError("coords must be strictly increasing")
    if float(values.max()) < HALF_MAX:
        raise ValueError("profile maximum is below the half-maximum level")

    above = values >= HALF_MAX
    runs = _contiguous_runs(above)
    if len(runs) > 1:
        raise ValueError("multiple peaks above the half maximum; restrict the window to one period")
    a, b = runs[0]
    if a == 0 or b == values.size - 1:
        raise ValueError("no crossing of the half maximum inside the window")

    xtol = 1e-4 * lambda_c

    def interp(i: int, j: int):
        return lambda xx: values[i] + (values[j] - values[i]) * (xx - coords[i]) / (
            coords[j] - coords[i]
        ) - HALF_MAX

    left = _bisect_to(interp(a - 1, a), float(coords[a - 1]), float(coords[a]), xtol)
    right = _bisect_to(interp(b, b + 1), float(coords[b]), float(coords[b + 1]), xtol)
    return right - left


def _contiguous_runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Closed index intervals of True runs."""
    runs = []
    start = None
    for i, flag in enumerate(mask):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            runs.append((start, i - 1))
            start = None
    if start is not None:
        runs.append((start, mask.size - 1))
    return runs


__all__ = [
    "MODE_NONE",
    "MODE_PARTIAL",
    "MODE_PERFECT",
    "OFFSET_CALIBRATED",
    "OFFSET_DETUNED",
    "HALF_MAX",
    "ScanProfile",
    "Map3D",
    "default_map_extents",
    "transverse_scan",
    "oam_broadening_scan",
    "analytic_a_r",
    "analytic_a_z",
    "longitudinal_scan",
    "map3d",
    "iso_extents",
    "extract_fwhm",
]
