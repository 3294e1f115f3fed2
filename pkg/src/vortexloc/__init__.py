"""Steady-state Rydberg excitation and sub-wavelength localization around a vortex control beam.

A three-level ladder ensemble driven by a doughnut-mode control field and a
traveling-wave probe develops a narrow excitation peak at the vortex core.
This package computes the steady state (closed form and by integrating the
optical Bloch equations), the blockade-masked mean-field interaction shift,
the self-consistent antiblockade calibration, 1D/3D localization profiles
with half-maximum widths, and Monte-Carlo noise robustness, all with
deterministic, worker-count-independent numerics.
"""

from .bloch import (
    BlochState,
    LocalDrive,
    Trajectory,
    antiblockade_sigma,
    approx_sigma,
    bloch_rhs,
    dark_state_weights,
    evolve,
    ground_state,
    linewidth_from,
    linewidth_w,
    sigma_rr_steady,
    steady_sigma_rr,
    steady_time,
)
from .config import (
    CONSTANT,
    STANDING_WAVE,
    AtomMedium,
    BeamConfig,
    DetuningModulation,
    Position,
    ProbeConfig,
    SystemConfig,
    angular_from_mhz,
    make_config,
    mhz_from_angular,
    with_delta_shift,
    with_probe_amplitude,
    with_winding,
)
from .fields import (
    FieldSample,
    control_envelope,
    detuning_profile,
    envelope_maximum,
    eta_of_radius,
    intensity_ratio_eta,
    lg_amplitude,
    sample_fields,
    taylor_eta,
)
from .localization import (
    MODE_NONE,
    MODE_PARTIAL,
    MODE_PERFECT,
    OFFSET_CALIBRATED,
    OFFSET_DETUNED,
    Map3D,
    ScanProfile,
    analytic_a_r,
    analytic_a_z,
    extract_fwhm,
    iso_extents,
    longitudinal_scan,
    map3d,
    oam_broadening_scan,
    transverse_scan,
)
from .meanfield import (
    MASK_ATOM,
    MASK_LOCAL,
    BlockadeBoundary,
    QuadratureSpec,
    ShiftGrid,
    blockade_boundary,
    blockade_radius,
    calibrate_delta,
    calibrated_offset,
    chi_mask,
    excitation_fraction,
    s0_integral,
    shift_at,
    shift_profile,
    superatom_count,
)
from .noise import (
    KIND_FREQUENCY,
    KIND_INTENSITY,
    IntensityField,
    NoiseSpec,
    NoisyScan,
    noisy_transverse_scan,
    sample_frequency_offsets,
    sample_intensity_field,
    spread_at,
    trajectory_rng,
)
from .output import PACKAGE_VERSION, RunManifest, write_table

__version__ = PACKAGE_VERSION

__all__ = [
    "__version__",
    # configuration
    "CONSTANT",
    "STANDING_WAVE",
    "BeamConfig",
    "ProbeConfig",
    "DetuningModulation",
    "AtomMedium",
    "Position",
    "SystemConfig",
    "make_config",
    "angular_from_mhz",
    "mhz_from_angular",
    "with_delta_shift",
    "with_probe_amplitude",
    "with_winding",
    # fields
    "FieldSample",
    "lg_amplitude",
    "control_envelope",
    "envelope_maximum",
    "eta_of_radius",
    "intensity_ratio_eta",
    "taylor_eta",
    "detuning_profile",
    "sample_fields",
    # dynamics and steady state
    "BlochState",
    "LocalDrive",
    "Trajectory",
    "bloch_rhs",
    "ground_state",
    "evolve",
    "sigma_rr_steady",
    "steady_sigma_rr",
    "antiblockade_sigma",
    "approx_sigma",
    "linewidth_w",
    "linewidth_from",
    "dark_state_weights",
    "steady_time",
    # interaction shift
    "MASK_LOCAL",
    "MASK_ATOM",
    "QuadratureSpec",
    "ShiftGrid",
    "BlockadeBoundary",
    "blockade_radius",
    "superatom_count",
    "excitation_fraction",
    "chi_mask",
    "shift_at",
    "shift_profile",
    "s0_integral",
    "calibrated_offset",
    "calibrate_delta",
    "blockade_boundary",
    # localization
    "MODE_NONE",
    "MODE_PARTIAL",
    "MODE_PERFECT",
    "OFFSET_CALIBRATED",
    "OFFSET_DETUNED",
    "ScanProfile",
    "Map3D",
    "transverse_scan",
    "oam_broadening_scan",
    "longitudinal_scan",
    "analytic_a_r",
    "analytic_a_z",
    "map3d",
    "iso_extents",
    "extract_fwhm",
    # noise
    "KIND_INTENSITY",
    "KIND_FREQUENCY",
    "NoiseSpec",
    "IntensityField",
    "NoisyScan",
    "trajectory_rng",
    "sample_intensity_field",
    "sample_frequency_offsets",
    "noisy_transverse_scan",
    "spread_at",
    # output
    "RunManifest",
    "write_table",
]
