"""Equations of motion and analytic steady states.

The oracle here is an independent three-level master equation written
directly against a 3x3 density matrix: RHS agreement is checked component
by component, and the analytic steady-state formula is checked against the
null space of the independently built generator.
"""

import math

import numpy as np
import pytest

from vortexloc import make_config
from vortexloc.bloch import (
    BlochState,
    LocalDrive,
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
from vortexloc.config import TWO_PI, Position
from vortexloc.fields import control_envelope, eta_of_radius

SIGMA_GE = np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0]], dtype=complex)
SIGMA_ER = np.array([[0, 0, 0], [0, 0, 1], [0, 0, 0]], dtype=complex)


def _hamiltonian(drive):
    two_photon = drive.delta_p + drive.delta_c - drive.s_shift
    return np.array(
        [
            [0.0, drive.omega_p, 0.0],
            [drive.omega_p, drive.delta_p, drive.omega_c],
            [0.0, np.conj(drive.omega_c), two_photon],
        ],
        dtype=complex,
    )


def _master_rhs(rho, drive):
    """Independent master-equation right-hand side on the raw density matrix.

    Cascade decay in Lindblad form, plus the extra dephasing needed to damp
    both optical coherences at the single rate drive.gamma (the bare cascade
    would give gamma_e/2 on ge). Both extras vanish for a stable upper level
    with gamma = gamma_e/2, where this is the plain Lindblad equation.
    """
    h = _hamiltonian(drive)
    out = -1j * (h @ rho - rho @ h)
    for rate, c in ((drive.gamma_e, SIGMA_GE), (drive.gamma_r, SIGMA_ER)):
        if rate:
            cd = c.conj().T
            out = out + rate * (c @ rho @ cd - 0.5 * (cd @ c @ rho + rho @ cd @ c))
    extra_ge = drive.gamma - 0.5 * drive.gamma_e
    extra_er = drive.gamma - 0.5 * (drive.gamma_e + drive.gamma_r)
    adj = np.zeros((3, 3), dtype=complex)
    adj[0, 1] = -extra_ge * rho[0, 1]
    adj[1, 0] = -extra_ge * rho[1, 0]
    adj[1, 2] = -extra_er * rho[1, 2]
    adj[2, 1] = -extra_er * rho[2, 1]
    return out + adj


def _rho_from_state(state):
    return np.array(
        [
            [state.sigma_gg, state.sigma_ge, state.sigma_gr],
            [np.conj(state.sigma_ge), state.sigma_ee, state.sigma_er],
            [np.conj(state.sigma_gr), np.conj(state.sigma_er), state.sigma_rr],
        ],
        dtype=complex,
    )


def _steady_oracle(drive):
    """sigma_rr of the trace-one null vector of the independent generator."""
    basis = []
    for i in range(3):
        for j in range(3):
            e = np.zeros((3, 3), dtype=complex)
            e[i, j] = 1.0
            basis.append(_master_rhs(e, drive).reshape(9))
    gen = np.array(basis, dtype=complex).T
    rows = np.vstack([gen, np.array([[1, 0, 0, 0, 1, 0, 0, 0, 1]], dtype=complex)])
    rhs = np.zeros(10, dtype=complex)
    rhs[9] = 1.0
    rho, *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    return float(rho.reshape(3, 3)[2, 2].real)


def _random_drive(rng, with_decay_chain=False):
    gamma_e = float(rng.uniform(25.0, 50.0))
    gamma_r = float(rng.uniform(0.0, 2.0)) if with_decay_chain else 0.0
    omega_p = float(rng.uniform(8.0, 25.0))
    ratio = float(rng.uniform(0.8, 1.4))
    phase = float(rng.uniform(0.0, TWO_PI))
    return LocalDrive(
        omega_p=omega_p,
        omega_c=omega_p * ratio * complex(math.cos(phase), math.sin(phase)),
        delta_p=float(rng.uniform(-12.0, 12.0)),
        delta_c=float(rng.uniform(-12.0, 12.0)),
        s_shift=float(rng.uniform(-6.0, 6.0)),
        gamma=0.5 * (gamma_e + gamma_r),
        gamma_e=gamma_e,
        gamma_r=gamma_r,
    )


def settle_plan(drive, decades=8.0):
    """(t_end, dt) long and fine enough to damp transients below ~10**-decades.

    The slowest relaxation rate is read off the generator spectrum, probed
    column by column from bloch_rhs.
    """
    zero = BlochState(0.0, 0.0, 0.0, 0j, 0j, 0j)
    offset = bloch_rhs(zero, drive).as_vector()
    cols = []
    for j in range(9):
        vec = np.zeros(9)
        vec[j] = 1.0
        cols.append(bloch_rhs(BlochState.from_vector(vec), drive).as_vector() - offset)
    rates = -np.linalg.eigvals(np.array(cols).T).real
    slowest = float(np.min(rates[rates > 1e-9]))
    t_end = decades * math.log(10.0) / slowest
    dt = 0.04 / _fastest(drive)
    return t_end, dt


def _fastest(drive):
    return max(
        abs(drive.omega_p),
        abs(drive.omega_c),
        drive.gamma_e,
        abs(drive.delta_p),
        abs(drive.delta_c - drive.s_shift),
        abs(drive.delta_p + drive.delta_c - drive.s_shift),
    )


def _random_state(rng):
    pops = rng.uniform(0.0, 1.0, 3)
    pops = pops / pops.sum()
    coh = rng.uniform(-0.3, 0.3, 6)
    return BlochState(
        sigma_gg=float(pops[0]),
        sigma_ee=float(pops[1]),
        sigma_rr=float(pops[2]),
        sigma_ge=complex(coh[0], coh[1]),
        sigma_er=complex(coh[2], coh[3]),
        sigma_gr=complex(coh[4], coh[5]),
    )


def drive_at_intensity_ratio(kappa, q=2.0 / 3.0):
    """Resonant local drive at the radius where I_c/I_p = q."""
    cfg = make_config(kappa=kappa)
    lo, hi = 0.0, cfg.beam.waist_w0 / math.sqrt(2.0)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if eta_of_radius(mid, cfg) < q:
            lo = mid
        else:
            hi = mid
    env = control_envelope(0.5 * (lo + hi), cfg.beam)
    m = cfg.medium
    return LocalDrive(
        omega_p=cfg.probe.omega_p0,
        omega_c=env,
        delta_p=0.0,
        delta_c=0.0,
        s_shift=0.0,
        gamma=m.gamma,
        gamma_e=m.gamma_e,
        gamma_r=m.gamma_r,
    )


def test_rhs_matches_the_independent_master_equation():
    rng = np.random.default_rng(101)
    for k in range(50):
        drive = _random_drive(rng, with_decay_chain=(k % 3 == 0))
        state = _random_state(rng)
        got = bloch_rhs(state, drive)
        want = _master_rhs(_rho_from_state(state), drive)
        scale = max(1.0, float(np.max(np.abs(want))))
        assert abs(got.sigma_gg - want[0, 0].real) <= 1e-12 * scale
        assert abs(got.sigma_ee - want[1, 1].real) <= 1e-12 * scale
        assert abs(got.sigma_rr - want[2, 2].real) <= 1e-12 * scale
        assert abs(got.sigma_ge - want[0, 1]) <= 1e-12 * scale
        assert abs(got.sigma_er - want[1, 2]) <= 1e-12 * scale
        assert abs(got.sigma_gr - want[0, 2]) <= 1e-12 * scale


def test_ground_state_without_probe_is_stationary():
    drive = LocalDrive(0.0, 10.0 + 0j, 1.0, 2.0, 0.0, 19.0, 38.0)
    d = bloch_rhs(ground_state(), drive)
    assert d.sigma_gg == 0.0 and d.sigma_ee == 0.0 and d.sigma_rr == 0.0
    assert d.sigma_ge == 0.0 and d.sigma_er == 0.0 and d.sigma_gr == 0.0


def test_derivative_conserves_the_trace():
    rng = np.random.default_rng(55)
    for _ in range(100):
        drive = _random_drive(rng)
        d = bloch_rhs(_random_state(rng), drive)
        assert abs(d.sigma_gg + d.sigma_ee + d.sigma_rr) < 1e-12


def test_uncoupled_rydberg_level_stays_empty():
    drive = LocalDrive(8.0, 0j, 0.0, 0.0, 0.0, 19.0, 38.0)
    traj = evolve(ground_state(), drive, t_end=2.0, dt=1e-3)
    assert np.all(traj.sigma_rr == 0.0)
    assert np.all(np.abs(traj.sigma_gr) == 0.0)
    assert traj.sigma_ee[-1] > 0.01  # damped two-level drive populates |e>
    assert abs(traj.sigma_gg[-1] + traj.sigma_ee[-1] - 1.0) < 1e-9


def test_steady_formula_matches_the_master_equation_null_space():
    rng = np.random.default_rng(202)
    for _ in range(20):
        drive = _random_drive(rng)
        assert steady_sigma_rr(drive) == pytest.approx(_steady_oracle(drive), abs=1e-10)


def test_long_time_evolution_reaches_the_analytic_steady_state():
    rng = np.random.default_rng(303)
    for _ in range(8):
        drive = _random_drive(rng)
        t_end, dt = settle_plan(drive)
        traj = evolve(ground_state(), drive, t_end=t_end, dt=dt, sample_every=4000)
        assert traj.sigma_rr[-1] == pytest.approx(steady_sigma_rr(drive), abs=1e-6)
        trace = traj.sigma_gg + traj.sigma_ee + traj.sigma_rr
        assert np.max(np.abs(trace - 1.0)) < 1e-9


def test_halving_the_step_barely_moves_the_endpoint():
    drive = LocalDrive(12.0, 9.0 * np.exp(0.7j), 5.0, -8.0, 2.0, 19.0, 38.0)
    coarse = evolve(ground_state(), drive, t_end=2.0, dt=1e-3, sample_every=2000)
    fine = evolve(ground_state(), drive, t_end=2.0, dt=5e-4, sample_every=4000)
    assert abs(coarse.sigma_rr[-1] - fine.sigma_rr[-1]) < 1e-8


def test_step_size_guard_rejects_underresolved_integration():
    drive = LocalDrive(10.0, 10.0 + 0j, 0.0, 0.0, 0.0, 19.0, 38.0)
    with pytest.raises(ValueError, match="dt"):
        evolve(ground_state(), drive, t_end=1.0, dt=0.01)
    with pytest.raises(ValueError, match="t_end"):
        evolve(ground_state(), drive, t_end=0.0, dt=1e-3)


def test_steady_sigma_special_points():
    # no control field, fully resonant: saturation at 1
    assert sigma_rr_steady(4.0, 0.0, 0.0, 0.0, 19.0) == 1.0
    # compensated two-photon detuning at equal intensities: 1/2
    assert sigma_rr_steady(4.0, 4.0, 0.0, 0.0, 19.0) == 0.5
    with pytest.raises(ValueError, match="degenerate"):
        steady_sigma_rr(LocalDrive(0.0, 0j, 0.0, 0.0, 0.0, 19.0, 38.0))


def test_steady_formula_reduces_to_the_lorentzian_in_the_weak_control_limit():
    # at the half-width detuning the weak-control profile sits at 1/2
    ip, gamma = 25.0, 19.0
    ic = 1e-4 * ip
    w = linewidth_from(ip, ic, 0.0, gamma)
    val = sigma_rr_steady(ip, ic, 0.0, w, gamma)
    assert val == pytest.approx(0.5, rel=0.02)
    assert approx_sigma(w, 0.0, w) == 0.5


def test_antiblockade_sigma_reduction():
    assert antiblockade_sigma(0.0) == 1.0
    assert antiblockade_sigma(1.0) == 0.5
    rng = np.random.default_rng(17)
    ip = 9.0
    for eta in rng.uniform(0.0, 50.0, 50):
        # compensated detuning: the full formula must collapse to 1/(1+eta)
        full = sigma_rr_steady(ip, eta * ip, 0.0, 0.0, 21.0)
        assert abs(full - antiblockade_sigma(float(eta))) < 1e-12
    with pytest.raises(ValueError, match="eta"):
        antiblockade_sigma(-0.1)


def test_perfect_antiblockade_saturates_at_the_dark_core():
    # sigma -> 1 as the control intensity vanishes toward the vortex core
    ip = 1.0106  # probe intensity at kappa=500
    last = 0.0
    for eta in (1e-1, 1e-2, 1e-3):
        val = sigma_rr_steady(ip, eta * ip, 0.0, 0.0, 19.0)
        assert val > last
        last = val
    assert last >= 1.0 - 1e-3


def test_lorentzian_approximation_arithmetic():
    assert approx_sigma(5.0, 5.0, 2.0) == 1.0
    assert approx_sigma(11.0, 5.0, 2.0) == pytest.approx(0.1)
    with pytest.raises(ValueError, match="linewidth"):
        approx_sigma(1.0, 0.0, 0.0)


def test_linewidth_at_the_reference_point():
    cfg = make_config(kappa=100.0)
    ip = cfg.probe.omega_p0**2
    w = linewidth_from(ip, 0.0, 0.0, cfg.medium.gamma)
    assert w / TWO_PI == pytest.approx(0.198, rel=1e-2)
    drive = LocalDrive.from_config(cfg, Position(0.0, 0.0, 0.0))
    assert linewidth_w(drive) == pytest.approx(w, rel=1e-12)


def test_linewidth_limits():
    # vanishing probe: w -> I_c / gamma
    assert linewidth_from(1e-12, 7.0, 0.0, 19.0) == pytest.approx(7.0 / 19.0, rel=1e-6)
    # gamma-dominated regime: doubling both intensities doubles w
    w1 = linewidth_from(0.5, 1.0, 0.0, 19.0)
    w2 = linewidth_from(1.0, 2.0, 0.0, 19.0)
    assert w2 == pytest.approx(2.0 * w1, rel=2e-3)
    with pytest.raises(ValueError, match="positive"):
        linewidth_from(0.0, 1.0, 0.0, 0.0)


def test_dark_state_weights():
    r_amp, g_amp = dark_state_weights(3.0, 0j)
    assert (r_amp, g_amp) == (1.0, 0.0)
    r_amp, g_amp = dark_state_weights(0.0, 2.0 + 0j)
    assert (r_amp, g_amp) == (0.0, -1.0)
    r_amp, g_amp = dark_state_weights(1.5, 2.0 - 1.0j)
    assert abs(r_amp) ** 2 + abs(g_amp) ** 2 == pytest.approx(1.0, rel=1e-12)
    with pytest.raises(ValueError, match="zero fields"):
        dark_state_weights(0.0, 0j)


def test_steady_time_at_the_reference_working_points():
    t180 = steady_time(drive_at_intensity_ratio(180.0), rel_tol=0.01, t_budget=30.0)
    assert t180 == pytest.approx(11.114, abs=0.05)
    t10 = steady_time(drive_at_intensity_ratio(10.0), rel_tol=0.01, t_budget=5.0)
    assert t10 == pytest.approx(0.518, abs=0.05)
    assert t10 < t180


def test_steady_time_input_validation():
    drive = drive_at_intensity_ratio(10.0)
    with pytest.raises(ValueError, match="rel_tol"):
        steady_time(drive, rel_tol=0.5)
    with pytest.raises(ValueError, match="t_budget"):
        steady_time(drive, t_budget=-1.0)
    with pytest.raises(RuntimeError, match="no steady entry"):
        steady_time(drive_at_intensity_ratio(180.0), rel_tol=0.01, t_budget=0.5)
