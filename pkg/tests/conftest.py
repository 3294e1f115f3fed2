"""Shared fixtures.

The self-consistent delta calibrations are the only expensive setup, so they
are cached per (kappa, lattice) for the whole session and shared between the
unit tests and the acceptance suite.
"""

from __future__ import annotations

from functools import lru_cache

import pytest

from vortexloc import QuadratureSpec, calibrated_offset, make_config


@lru_cache(maxsize=None)
def _calibration(kappa: float, fast: bool) -> tuple[float, float]:
    config = make_config(kappa=kappa)
    lam = config.beam.wavelength_c
    quad = QuadratureSpec.fast(lam) if fast else QuadratureSpec.paper_default(lam)
    return calibrated_offset(config, quad=quad)


@pytest.fixture(scope="session")
def full_calibration():
    """kappa -> (s_0, delta) in rad/us on the reference 0.01 lambda_c lattice."""
    return lambda kappa: _calibration(float(kappa), False)


@pytest.fixture(scope="session")
def fast_calibration():
    """kappa -> (s_0, delta) in rad/us on the coarser 0.02 lambda_c lattice."""
    return lambda kappa: _calibration(float(kappa), True)
