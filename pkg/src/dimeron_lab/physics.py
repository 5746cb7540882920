"""Macrodimer binding potential, vibrational modes and lattice ground states.

The binding potential is treated in harmonic approximation around the bond
length R_v.  The relative coordinate of an atom pair carries the reduced
mass m/2, so the harmonic oscillator length is l = sqrt(2 hbar/m / omega_v)
and the free-motion dispersion is omega(k) = (hbar/m) k^2.

Vibrational modes are expanded in box-normalized standing waves
cos(k (R - R_v)) and sin(k (R - R_v)); the resulting Franck-Condon overlaps
have closed Hermite-Gauss forms which are used directly (the brute-force
quadrature on a +-8 l grid serves as the test oracle).
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_hermite

from .constants import HBAR_OVER_M, TWO_PI
from .errors import ConfigurationError

MAX_VIBRATIONAL_MODES = 6


@dataclass(frozen=True)
class PotentialModel:
    """Harmonic macrodimer binding potential.

    r_v        bond length (nm)
    omega_v    vibrational angular frequency (rad/us)
    n_modes    number of vibrational modes retained (1..6)
    """

    r_v: float = 712.0
    omega_v: float = TWO_PI * 3.8
    n_modes: int = 1

    def __post_init__(self):
        if not self.omega_v > 0.0:
            raise ConfigurationError(f"omega_v must be positive, got {self.omega_v}")
        if not self.r_v > 0.0:
            raise ConfigurationError(f"r_v must be positive, got {self.r_v}")
        if not 1 <= self.n_modes <= MAX_VIBRATIONAL_MODES:
            raise ConfigurationError(
                f"n_modes must be in [1, {MAX_VIBRATIONAL_MODES}], got {self.n_modes}"
            )
        if not self.length < self.r_v:
            raise ConfigurationError(
                f"harmonic length {self.length:.3g} nm must stay below r_v={self.r_v} nm"
            )

    @property
    def length(self):
        """Harmonic oscillator length l (nm) for reduced mass m/2."""
        return math.sqrt(2.0 * HBAR_OVER_M / self.omega_v)

    def mode_offset(self, v):
        """Energy of mode v relative to the v=0 line (rad/us)."""
        return v * self.omega_v


@dataclass(frozen=True)
class LatticeParams:
    """Square optical lattice hosting the atoms.

    a_lat      lattice constant (nm)
    omega_lat  on-site trap angular frequency (rad/us)
    """

    a_lat: float = 532.0
    omega_lat: float = TWO_PI * 0.128

    def __post_init__(self):
        if not self.a_lat > 0.0 or not self.omega_lat > 0.0:
            raise ConfigurationError("lattice constant and trap frequency must be positive")

    @property
    def diagonal_spacing(self):
        """Diagonal neighbor distance a = sqrt(2) a_lat (nm)."""
        return math.sqrt(2.0) * self.a_lat

    @property
    def sigma_site(self):
        """rms position spread of the on-site motional ground state (nm)."""
        return math.sqrt(HBAR_OVER_M / (2.0 * self.omega_lat))


@dataclass(frozen=True)
class GaussianState:
    """Normalized Gaussian motional amplitude.

    `width` is the rms spread of the probability density |psi|^2, i.e.
    psi(R) = (2 pi width^2)^(-1/4) exp(-(R-center)^2 / (4 width^2)).
    """

    center: float
    width: float
    normalized: bool = True

    def __post_init__(self):
        if not self.width > 0.0:
            raise ConfigurationError(f"width must be positive, got {self.width}")

    def amplitude(self, r):
        r = np.asarray(r, dtype=float)
        norm = (2.0 * math.pi * self.width**2) ** -0.25 if self.normalized else 1.0
        return norm * np.exp(-((r - self.center) ** 2) / (4.0 * self.width**2))


@dataclass(frozen=True)
class ContinuumGrid:
    """Uniform relative-momentum grid of box-normalized standing waves.

    Wavenumbers k_j = (j+1) dk for j = 0..n_k-1 with dk = kappa_max / n_k;
    k = 0 is excluded (zero measure, ill-normalized).  The implied box
    length is L = 2 pi / dk and each of the cos/sin channels carries weight
    sqrt(2/L).
    """

    n_k: int = 400
    kappa_max: float = 1.2

    def __post_init__(self):
        if self.n_k < 1:
            raise ConfigurationError(f"n_k must be >= 1, got {self.n_k}")
        if not self.kappa_max > 0.0:
            raise ConfigurationError(f"kappa_max must be positive, got {self.kappa_max}")

    @property
    def delta_kappa(self):
        return self.kappa_max / self.n_k

    @property
    def kappas(self):
        return (np.arange(self.n_k) + 1.0) * self.delta_kappa

    @property
    def omegas(self):
        """Kinetic energies (hbar/m) k^2 of the modes (rad/us)."""
        return HBAR_OVER_M * self.kappas**2

    @property
    def box_length(self):
        return TWO_PI / self.delta_kappa

    @property
    def coverage(self):
        """Largest kinetic energy representable on the grid (rad/us)."""
        return HBAR_OVER_M * self.kappa_max**2


def _mode_norm(v, length):
    return 1.0 / (math.pi**0.25 * math.sqrt(2.0**v * math.factorial(v) * length))


def vibrational_wavefunction(model, v, r):
    """Hermite-Gauss eigenfunction of mode v at positions r (nm^-1/2).

    Modes are centered at the bond length with oscillator length
    l = sqrt(2 hbar/m / omega_v) (reduced mass m/2).
    """
    if not 0 <= v < model.n_modes:
        raise ValueError(f"mode index {v} outside retained range [0, {model.n_modes})")
    length = model.length
    x = (np.asarray(r, dtype=float) - model.r_v) / length
    return _mode_norm(v, length) * eval_hermite(v, x) * np.exp(-0.5 * x**2)


def _check_grid_resolves(model, grid):
    if grid.delta_kappa * model.length > 0.5:
        raise ConfigurationError(
            f"grid too coarse to resolve the vibrational mode: "
            f"dk*l = {grid.delta_kappa * model.length:.3g} > 0.5"
        )


def franck_condon(model, v, grid, channel):
    """Overlaps f_k between mode v and the standing waves of one channel.

    channel='even' selects cos(k (R - R_v)), channel='odd' sin(k (R - R_v)).
    The overlap vanishes identically when the mode parity does not match
    the channel.  Per mode, sum_channels sum_j f_j^2 = 1 up to the grid
    truncation l*dk/sqrt(pi) + O((l*dk)^2) from the excluded k=0 cell.
    """
    if not 0 <= v < model.n_modes:
        raise ValueError(f"mode index {v} outside retained range [0, {model.n_modes})")
    if channel not in ("even", "odd"):
        raise ValueError(f"channel must be 'even' or 'odd', got {channel!r}")
    _check_grid_resolves(model, grid)

    if (v % 2 == 0) != (channel == "even"):
        return np.zeros(grid.n_k)

    length = model.length
    k = grid.kappas
    # Fourier transform of a Hermite-Gauss mode is Hermite-Gauss in k.
    envelope = eval_hermite(v, k * length) * np.exp(-0.5 * (k * length) ** 2)
    sign = (-1.0) ** (v // 2) if v % 2 == 0 else (-1.0) ** ((v - 1) // 2)
    momentum_norm = math.sqrt(length) / (math.pi**0.25 * math.sqrt(2.0**v * math.factorial(v)))
    return sign * math.sqrt(4.0 * math.pi / grid.box_length) * momentum_norm * envelope


def kinetic_energy_expectation(model, v, grid):
    """Kinetic energy stored in mode v, sum_j f_j^2 omega_j (rad/us).

    Equals (2v+1) omega_v / 4 up to grid truncation (virial theorem).
    """
    channel = "even" if v % 2 == 0 else "odd"
    f = franck_condon(model, v, grid, channel)
    return float(np.sum(f**2 * grid.omegas))


def lattice_relative_ground_state(lattice):
    """Relative-coordinate ground state of two adjacent diagonal atoms.

    Two independent on-site Gaussians of rms sigma_site give a relative
    Gaussian centered at sqrt(2) a_lat with rms sqrt(2) sigma_site.
    """
    return GaussianState(
        center=lattice.diagonal_spacing,
        width=math.sqrt(2.0) * lattice.sigma_site,
    )


def ground_state_overlaps(state, grid, origin, channel):
    """Overlaps of a Gaussian motional state with the standing-wave basis.

    The basis is centered at `origin` (the bond length in practice); the
    offset d = center - origin turns into cos(k d) / sin(k d) factors on a
    Gaussian momentum envelope.
    """
    if channel not in ("even", "odd"):
        raise ValueError(f"channel must be 'even' or 'odd', got {channel!r}")
    k = grid.kappas
    d = state.center - origin
    w = state.width
    envelope = (8.0 * math.pi * w**2) ** 0.25 * np.exp(-(k**2) * w**2)
    trig = np.cos(k * d) if channel == "even" else np.sin(k * d)
    return math.sqrt(2.0 / grid.box_length) * envelope * trig
