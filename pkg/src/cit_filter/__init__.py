"""Photon-number filtering by cavity-induced transparency.

Slow-light propagation of one- and two-photon wavepackets through an atomic
ensemble coupled to a cavity, with a brute-force lattice model for checks.
"""

from .darkstate import dark_coefficients, group_velocity_approx, group_velocity_exact
from .params import (PulseSpec, SystemParams, check_conditions, derive_quantities,
                     physical_from_mhz)

__all__ = [
    "PulseSpec", "SystemParams", "check_conditions", "dark_coefficients",
    "derive_quantities", "group_velocity_approx", "group_velocity_exact",
    "physical_from_mhz",
]
