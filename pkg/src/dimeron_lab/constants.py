"""Physical constants and the package-wide unit convention.

Internal units: lengths in nm, times in us, energies stored as angular
frequencies in rad/us.  All user-facing I/O (CLI, file formats) reports
linear frequencies in MHz, nu = omega / 2 pi; the conversion happens once
at the boundary.  This keeps every matrix element O(1)-scaled and leaves a
single mechanical constant, hbar/m, in the motional problem.
"""

import math

# CODATA hbar combined with the 87Rb mass.  hbar/m in nm^2 rad/us:
# 1 m^2/s = 1e12 nm^2/us.
_HBAR_SI = 1.054571817e-34  # J s
_MASS_RB87_SI = 1.44316e-25  # kg

HBAR_OVER_M = (_HBAR_SI / _MASS_RB87_SI) * 1e12  # ~730.74 nm^2 rad/us

# Radiative + black-body macrodimer decay rate, 1/us.  Documented constant
# only; decay dynamics are outside the coherent model.
GAMMA_MACRODIMER = 1.0 / 20.0

TWO_PI = 2.0 * math.pi


def mhz_to_rad_per_us(nu_mhz):
    """Linear frequency in MHz -> angular frequency in rad/us."""
    return TWO_PI * nu_mhz


def rad_per_us_to_mhz(omega):
    """Angular frequency in rad/us -> linear frequency in MHz."""
    return omega / TWO_PI
