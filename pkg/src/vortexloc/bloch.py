"""Single-(super)atom density-matrix dynamics and steady states.

The closed-form steady state is the primary path for every scan; the
fixed-step integrator exists for steady-time diagnostics and as an
independent check that the closed form is the true fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import Position, SystemConfig
from .fields import sample_fields


@dataclass(frozen=True)
class BlochState:
    """Density-matrix components of the three-level ladder {g, e, r}."""

    sigma_gg: float
    sigma_ee: float
    sigma_rr: float
    sigma_ge: complex
    sigma_er: complex
    sigma_gr: complex

    def as_vector(self) -> np.ndarray:
        """Real 9-vector [gg, ee, rr, Re/Im ge, Re/Im er, Re/Im gr]."""
        return np.array(
            [
                self.sigma_gg,
                self.sigma_ee,
                self.sigma_rr,
                self.sigma_ge.real,
                self.sigma_ge.imag,
                self.sigma_er.real,
                self.sigma_er.imag,
                self.sigma_gr.real,
                self.sigma_gr.imag,
            ],
            dtype=float,
        )

    @classmethod
    def from_vector(cls, v: np.ndarray) -> "BlochState":
        return cls(
            sigma_gg=float(v[0]),
            sigma_ee=float(v[1]),
            sigma_rr=float(v[2]),
            sigma_ge=complex(v[3], v[4]),
            sigma_er=complex(v[5], v[6]),
            sigma_gr=complex(v[7], v[8]),
        )


def ground_state() -> BlochState:
    return BlochState(1.0, 0.0, 0.0, 0j, 0j, 0j)


@dataclass(frozen=True)
class LocalDrive:
    """All drive parameters entering the equations of motion at one point."""

    omega_p: float
    omega_c: complex
    delta_p: float
    delta_c: float
    s_shift: float
    gamma: float
    gamma_e: float
    gamma_r: float = 0.0

    @classmethod
    def from_config(cls, config: SystemConfig, pos: Position, s_shift: float = 0.0) -> "LocalDrive":
        sample = sample_fields(config, pos)
        m = config.medium
        return cls(
            omega_p=sample.omega_p,
            omega_c=sample.omega_c,
            delta_p=config.probe.delta_p,
            delta_c=sample.delta_c,
            s_shift=s_shift,
            gamma=m.gamma,
            gamma_e=m.gamma_e,
            gamma_r=m.gamma_r,
        )

    def intensities(self) -> tuple[float, float]:
        """(I_p, I_c) = (|Omega_p|^2, |Omega_c|^2); computed on demand, never stored."""
        oc = self.omega_c
        return self.omega_p * self.omega_p, (oc * oc.conjugate()).real


def bloch_rhs(state: BlochState, drive: LocalDrive) -> BlochState:
    """Time derivative of the density-matrix components.

    Dephasings: gamma_ge = gamma_er = gamma, gamma_gr = gamma_r/2 (zero for a
    stable Rydberg level). The Rydberg population derivative is defined as
    -(d sigma_gg + d sigma_ee) so the trace is conserved identically.
    """
    op = drive.omega_p
    oc = drive.omega_c
    dp = drive.delta_p
    two_photon = drive.delta_p + drive.delta_c - drive.s_shift
    dc_eff = drive.delta_c - drive.s_shift
    gamma = drive.gamma
    gamma_gr = 0.5 * drive.gamma_r

    d_gg = drive.gamma_e * state.sigma_ee - 2.0 * (op * state.sigma_ge).imag
    d_ee = (
        drive.gamma_r * state.sigma_rr
        - drive.gamma_e * state.sigma_ee
        - 2.0 * (oc.conjugate() * state.sigma_er).imag
        + 2.0 * (op * state.sigma_ge).imag
    )
    d_ge = (1j * dp - gamma) * state.sigma_ge + 1j * (
        oc.conjugate() * state.sigma_gr - op * (state.sigma_ee - state.sigma_gg)
    )
    d_er = (1j * dc_eff - gamma) * state.sigma_er - 1j * (
        op * state.sigma_gr + oc * (state.sigma_rr - state.sigma_ee)
    )
    d_gr = (1j * two_photon - gamma_gr) * state.sigma_gr + 1j * (
        oc * state.sigma_ge - op * state.sigma_er
    )
    d_rr = -(d_gg + d_ee)
    return BlochState(d_gg, d_ee, d_rr, d_ge, d_er, d_gr)


def _affine_generator(drive: LocalDrive) -> tuple[np.ndarray, np.ndarray]:
    """Probe bloch_rhs into x' = A x + b over the real 9-vector representation."""
    zero = BlochState.from_vector(np.zeros(9))
    b = bloch_rhs(zero, drive).as_vector()
    a = np.empty((9, 9), dtype=float)
    for j in range(9):
        e = np.zeros(9)
        e[j] = 1.0
        a[:, j] = bloch_rhs(BlochState.from_vector(e), drive).as_vector() - b
    return a, b


def _fastest_scale(drive: LocalDrive) -> float:
    return max(
        abs(drive.omega_p),
        abs(drive.omega_c),
        drive.gamma,
        drive.gamma_e,
        abs(drive.delta_p),
        abs(drive.delta_c - drive.s_shift),
        abs(drive.delta_p + drive.delta_c - drive.s_shift),
    )


def _check_step(dt: float, drive: LocalDrive) -> None:
    if dt <= 0:
        raise ValueError("dt must be positive")
    scale = _fastest_scale(drive)
    if scale > 0 and dt > 0.05 / scale:
        raise ValueError(
            f"step size {dt:.3g} us too large for the fastest drive scale "
            f"{scale:.3g} rad/us; need dt <= {0.05 / scale:.3g}"
        )


POPULATION_TOL = 1e-6


def _check_population(vec: np.ndarray, t: float) -> None:
    pops = vec[:3]
    trace = pops.sum()
    if not np.all(np.isfinite(vec)):
        raise RuntimeError(f"integration failure: non-finite state at t={t:.6g} us")
    if pops.min() < -POPULATION_TOL or pops.max() > 1.0 + POPULATION_TOL or abs(trace - 1.0) > POPULATION_TOL:
        raise RuntimeError(
            f"integration failure: populations out of range at t={t:.6g} us "
            f"(min={pops.min():.3e}, max={pops.max():.3e}, trace={trace:.9f})"
        )


@dataclass(frozen=True)
class Trajectory:
    """Sampled solution of the equations of motion."""

    times: np.ndarray
    sigma_gg: np.ndarray
    sigma_ee: np.ndarray
    sigma_rr: np.ndarray
    sigma_ge: np.ndarray
    sigma_er: np.ndarray
    sigma_gr: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def state(self, i: int) -> BlochState:
        return BlochState(
            float(self.sigma_gg[i]),
            float(self.sigma_ee[i]),
            float(self.sigma_rr[i]),
            complex(self.sigma_ge[i]),
            complex(self.sigma_er[i]),
            complex(self.sigma_gr[i]),
        )

    @property
    def final(self) -> BlochState:
        return self.state(len(self.times) - 1)


def _rk4_samples(x0: np.ndarray, drive: LocalDrive, n_steps: int, dt: float, sample_every: int):
    """Fixed-step order-4 run; yields (step_index, state_vector) at sampling points.

    The right-hand side is affine in the state for a fixed drive, so the
    stage evaluations use the generator probed once from bloch_rhs; this is
    the same arithmetic as calling bloch_rhs per stage, hoisted out of the loop.
    """
    a, b = _affine_generator(drive)
    x = x0.copy()
    yield 0, x
    sixth = dt / 6.0
    half = 0.5 * dt
    for step in range(1, n_steps + 1):
        k1 = a @ x + b
        k2 = a @ (x + half * k1) + b
        k3 = a @ (x + half * k2) + b
        k4 = a @ (x + dt * k3) + b
        x = x + sixth * (k1 + 2.0 * (k2 + k3) + k4)
        if step % sample_every == 0 or step == n_steps:
            yield step, x


def evolve(
    initial: BlochState,
    drive: LocalDrive,
    t_end: float,
    dt: float,
    sample_every: int = 1,
) -> Trajectory:
    """Integrate from `initial` for t_end microseconds with a fixed step dt.

    Sampled populations drifting outside [0, 1] or off unit trace by more
    than 1e-6 abort the run; nothing is silently clipped.
    """
    _check_step(dt, drive)
    if t_end <= 0:
        raise ValueError("t_end must be positive")
    n_steps = max(1, int(math.ceil(t_end / dt - 1e-12)))
    times = []
    samples = []
    for step, x in _rk4_samples(initial.as_vector(), drive, n_steps, dt, sample_every):
        t = step * dt
        _check_population(x, t)
        times.append(t)
        samples.append(x)
    arr = np.array(samples)
    return Trajectory(
        times=np.array(times),
        sigma_gg=arr[:, 0],
        sigma_ee=arr[:, 1],
        sigma_rr=arr[:, 2],
        sigma_ge=arr[:, 3] + 1j * arr[:, 4],
        sigma_er=arr[:, 5] + 1j * arr[:, 6],
        sigma_gr=arr[:, 7] + 1j * arr[:, 8],
    )


def sigma_rr_steady(ip, ic, delta_p, two_photon, gamma):
    """Closed-form steady Rydberg population from intensities and detunings.

    Vectorized over any mix of array arguments; `two_photon` is
    Delta_p + Delta_c - s.
    """
    total = ip + ic
    denom = total * total - 2.0 * delta_p * two_photon * ic + (
        gamma * gamma + delta_p * delta_p + 2.0 * ip
    ) * two_photon * two_photon
    return ip * total / denom


def steady_sigma_rr(drive: LocalDrive) -> float:
    """Steady-state sigma_rr for one drive; errors on a degenerate zero denominator."""
    ip, ic = drive.intensities()
    two_photon = drive.delta_p + drive.delta_c - drive.s_shift
    total = ip + ic
    denom = total * total - 2.0 * drive.delta_p * two_photon * ic + (
        drive.gamma * drive.gamma + drive.delta_p * drive.delta_p + 2.0 * ip
    ) * two_photon * two_photon
    if denom == 0.0:
        raise ValueError("degenerate drive: steady-state denominator is zero")
    return ip * total / denom


def antiblockade_sigma(eta: float) -> float:
    """Steady population 1/(1+eta) under an exactly compensated two-photon detuning."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    return 1.0 / (1.0 + eta)


def approx_sigma(delta_c: float, s: float, w: float) -> float:
    """Lorentzian approximation 1/(1 + (Delta_c - s)^2 / w^2), valid for I_c << I_p."""
    if w <= 0:
        raise ValueError("linewidth w must be positive")
    x = (delta_c - s) / w
    return 1.0 / (1.0 + x * x)


def linewidth_w(drive: LocalDrive) -> float:
    """Half-peak width w = (I_p + I_c) / sqrt(gamma^2 + Delta_p^2 + 2 I_p)."""
    ip, ic = drive.intensities()
    return linewidth_from(ip, ic, drive.delta_p, drive.gamma)


def linewidth_from(ip, ic, delta_p, gamma):
    """Vectorized linewidth from intensities."""
    under = gamma * gamma + delta_p * delta_p + 2.0 * ip
    if np.ndim(under) == 0 and under <= 0:
        raise ValueError("gamma^2 + Delta_p^2 + 2 I_p must be positive")
    return (ip + ic) / np.sqrt(under)


def dark_state_weights(omega_p: float, omega_c: complex) -> tuple[complex, complex]:
    """Normalized (|r>, |g>) components (Omega_p, -Omega_c)/sqrt(I_p + I_c) of the dark state."""
    ip = omega_p * omega_p
    ic = (omega_c * omega_c.conjugate()).real
    norm = math.sqrt(ip + ic)
    if norm == 0.0:
        raise ValueError("dark state undefined for zero fields")
    return (omega_p / norm, -omega_c / norm)


def steady_time(
    drive: LocalDrive,
    rel_tol: float = 0.01,
    t_budget: float = 200.0,
    dt: float | None = None,
) -> float:
    """Earliest time after which sigma_rr stays within rel_tol of its steady value.

    Integrates from the all-ground state; the band must hold at every later
    sampled time inside the budget, so transient re-entries do not count.
    """
    if not 0.0 < rel_tol <= 0.1:
        raise ValueError("rel_tol must lie in (0, 0.1]")
    if t_budget <= 0:
        raise ValueError("t_budget must be positive")
    target = steady_sigma_rr(drive)
    if target <= 0:
        raise ValueError("steady-state population is zero; steady time undefined")
    scale = _fastest_scale(drive)
    if dt is None:
        if scale == 0:
            raise ValueError("drive has no dynamics; steady time undefined")
        dt = 0.04 / scale
    _check_step(dt, drive)
    n_steps = int(math.ceil(t_budget / dt - 1e-12))
    band = rel_tol * target
    last_outside = -1
    n_seen = 0
    for step, x in _rk4_samples(ground_state().as_vector(), drive, n_steps, dt, sample_every=1):
        _check_population(x, step * dt)
        if abs(x[2] - target) > band:
            last_outside = step
        n_seen = step
    if last_outside >= n_seen:
        raise RuntimeError(
            f"no steady entry within t_budget={t_budget:g} us "
            f"(sigma_rr still outside the {rel_tol:.3g} band)"
        )
    return (last_outside + 1) * dt


__all__ = [
    "BlochState",
    "LocalDrive",
    "Trajectory",
    "ground_state",
    "bloch_rhs",
    "evolve",
    "sigma_rr_steady",
    "steady_sigma_rr",
    "antiblockade_sigma",
    "approx_sigma",
    "linewidth_w",
    "linewidth_from",
    "dark_state_weights",
    "steady_time",
]
