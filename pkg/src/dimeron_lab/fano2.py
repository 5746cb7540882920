"""Two-atom Fano model: a macrodimer line coupled to its motional continuum.

The laser couples the macrodimer only into the symmetric electronic channel
(|ge> + |eg>)/sqrt(2); the antisymmetric combination is both laser- and
probe-dark and is dropped, halving the basis.  The continuum is expanded in
real standing waves cos/sin(k (R - R_v)), which keeps the Hamiltonian real
symmetric and makes the parity channels explicit for phase extraction.  The
symmetric-channel rotation turns the bare coupling Omega_C/2 into
Omega_C/sqrt(2) per standing-wave mode.

Energy reference: the lowest macrodimer line sits at -Delta_C, higher modes
at -Delta_C + v omega_v; continuum modes at (hbar/m) k^2 > 0.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import curve_fit

from .constants import HBAR_OVER_M
from .errors import ConfigurationError
from .physics import (
    ContinuumGrid,
    GaussianState,
    LatticeParams,
    PotentialModel,
    franck_condon,
    ground_state_overlaps,
    lattice_relative_ground_state,
)
from .spectra import (
    DEFAULT_BROADENING,
    SpectrumResult,
    bin_sticks,
    broaden,
    kernel_density,
)

SCAN_SIDEBAND = "sideband"  # fix Delta_C, sweep the probe detuning
SCAN_COMMON = "common"      # sweep both together, delta_p = Delta_C

COVERAGE_FACTOR = 10.0
RESOLUTION_BOUND = 0.2


@dataclass(frozen=True)
class TwoAtomModel:
    """Macrodimer + continuum model parameters (all rates in rad/us)."""

    omega_c: float
    delta_c: float = 0.0
    potential: PotentialModel = field(default_factory=PotentialModel)
    grid: ContinuumGrid = field(default_factory=ContinuumGrid)
    ground: GaussianState = field(
        default_factory=lambda: lattice_relative_ground_state(LatticeParams())
    )
    scan: str = SCAN_SIDEBAND

    def __post_init__(self):
        if self.omega_c < 0.0:
            raise ConfigurationError(f"omega_c must be >= 0, got {self.omega_c}")
        if self.scan not in (SCAN_SIDEBAND, SCAN_COMMON):
            raise ConfigurationError(f"unknown scan mode {self.scan!r}")
        needed = COVERAGE_FACTOR * max(
            self.omega_c, self.potential.omega_v * self.potential.n_modes
        )
        if self.grid.coverage < needed:
            raise ConfigurationError(
                f"grid energy coverage {self.grid.coverage:.1f} rad/us below the "
                f"required {COVERAGE_FACTOR} x max(Omega_C, n_modes omega_v) = {needed:.1f}"
            )
        if self.grid.delta_kappa * self.potential.length > RESOLUTION_BOUND:
            raise ConfigurationError(
                f"dk*l = {self.grid.delta_kappa * self.potential.length:.3g} exceeds "
                f"the resolution bound {RESOLUTION_BOUND}"
            )


@dataclass(frozen=True)
class EigenSystem:
    """Eigen-decomposition with labeled basis states.

    Labels are tuples; the first entry names the sector ('md', 'even',
    'odd' for two atoms; 'e1'..'e3', 'md1', 'md2' for three).
    """

    energies: np.ndarray
    vectors: np.ndarray
    labels: tuple

    def sector_mask(self, *sectors):
        return np.array([lab[0] in sectors for lab in self.labels])

    def sector_weights(self, *sectors):
        """Per-eigenstate population of the given basis sectors."""
        mask = self.sector_mask(*sectors)
        return np.sum(np.abs(self.vectors[mask]) ** 2, axis=0)


def build_hamiltonian(model):
    """Assemble the real symmetric two-atom Hamiltonian and its labels."""
    pot, grid = model.potential, model.grid
    nm, nk = pot.n_modes, grid.n_k
    n = nm + 2 * nk
    h = np.zeros((n, n))

    labels = [("md", v) for v in range(nm)]
    labels += [("even", j) for j in range(nk)]
    labels += [("odd", j) for j in range(nk)]

    for v in range(nm):
        h[v, v] = -model.delta_c + pot.mode_offset(v)
    omegas = grid.omegas
    h[nm : nm + nk, nm : nm + nk] = np.diag(omegas)
    h[nm + nk :, nm + nk :] = np.diag(omegas)

    g = model.omega_c / math.sqrt(2.0)
    for v in range(nm):
        channel = "even" if v % 2 == 0 else "odd"
        f = franck_condon(pot, v, grid, channel)
        block = slice(nm, nm + nk) if channel == "even" else slice(nm + nk, n)
        h[v, block] = g * f
        h[block, v] = g * f
    return h, tuple(labels)


def solve_two_atom(model):
    """Exact diagonalization of the two-atom model."""
    h, labels = build_hamiltonian(model)
    energies, vectors = np.linalg.eigh(h)
    return EigenSystem(energies=energies, vectors=vectors, labels=labels)


def toy_single_mode_eigensystem(omega_c, delta_c=0.0):
    """Degenerate single-continuum-mode limit: one state at omega=0, f=1.

    Analytic eigenvalues are +-Omega_C/sqrt(2) at Delta_C = 0, i.e. a
    splitting of sqrt(2) Omega_C with half the weight on each sector.
    """
    g = omega_c / math.sqrt(2.0)
    h = np.array([[-delta_c, g], [g, 0.0]])
    energies, vectors = np.linalg.eigh(h)
    return EigenSystem(energies=energies, vectors=vectors, labels=(("md", 0), ("even", 0)))


def probe_overlaps(model):
    """Ground-state overlap vector over the full basis (zero on md rows)."""
    nm, nk = model.potential.n_modes, model.grid.n_k
    g = np.zeros(nm + 2 * nk)
    g[nm : nm + nk] = ground_state_overlaps(
        model.ground, model.grid, model.potential.r_v, "even"
    )
    g[nm + nk :] = ground_state_overlaps(
        model.ground, model.grid, model.potential.r_v, "odd"
    )
    return g


def _loss_fractions(eigs, w_md, loss_model, n_atoms):
    if loss_model == "expected":
        return (1.0 * (1.0 - w_md) + 2.0 * w_md) / n_atoms
    if loss_model == "rydberg_only":
        return (1.0 - w_md) / n_atoms
    raise ConfigurationError(f"unknown loss model {loss_model!r}")


def stick_spectrum(eigs, model, loss_model="expected"):
    """Per-eigenstate absorption and loss weights (energies, C_abs, S)."""
    g = probe_overlaps(model)
    amps = eigs.vectors.T @ g
    c_abs = amps**2
    w_md = eigs.sector_weights("md")
    f = _loss_fractions(eigs, w_md, loss_model, n_atoms=2)
    return eigs.energies, c_abs, f * c_abs


def absorption_spectrum(eigs, model, axis, broadening=DEFAULT_BROADENING,
                        loss_model="expected"):
    """Probe spectrum on the given detuning axis.

    Sideband scan: the Hamiltonian is fixed; eigenvalue sticks are binned
    onto the axis and convolved with a unit-sum Gaussian kernel.  Common
    scan: the Hamiltonian is rebuilt with Delta_C = delta_p at every axis
    point and the broadened signal is evaluated at E = delta_p.
    """
    axis = np.asarray(axis, dtype=float)
    step = axis[1] - axis[0]
    if np.max(np.abs(axis)) > model.grid.coverage:
        raise ConfigurationError(
            f"axis extends to {np.max(np.abs(axis)):.1f} rad/us, beyond the grid "
            f"coverage {model.grid.coverage:.1f}"
        )
    low_spacing = 3.0 * HBAR_OVER_M * model.grid.delta_kappa**2
    if low_spacing > broadening:
        raise ConfigurationError(
            f"low-k level spacing {low_spacing:.3g} rad/us exceeds the requested "
            f"broadening {broadening:.3g}; refine the grid"
        )

    if model.scan == SCAN_SIDEBAND:
        energies, c_abs, s = stick_spectrum(eigs, model, loss_model)
        c_axis = bin_sticks(energies, c_abs, axis)
        s_axis = bin_sticks(energies, s, axis)
        return SpectrumResult(axis, c_axis, s_axis, broaden(s_axis, step, broadening),
                              broadening)

    c_axis = np.empty_like(axis)
    s_axis = np.empty_like(axis)
    for i, delta in enumerate(axis):
        point_model = replace(model, delta_c=delta, scan=SCAN_SIDEBAND)
        point_eigs = solve_two_atom(point_model)
        energies, c_abs, s = stick_spectrum(point_eigs, point_model, loss_model)
        c_axis[i] = kernel_density(energies, c_abs, delta, broadening, step)
        s_axis[i] = kernel_density(energies, s, delta, broadening, step)
    return SpectrumResult(axis, c_axis, s_axis, s_axis.copy(), broadening)


@dataclass(frozen=True)
class PhaseCurve:
    """Scattering phases of positive-energy eigenstates in one parity channel."""

    energies: np.ndarray
    phase: np.ndarray       # branch values in (-pi/2, pi/2]
    unwrapped: np.ndarray
    dphase_de: np.ndarray
    reliable: np.ndarray
    parity: str


FIT_RESIDUAL_BOUND = 0.05


def scattering_phases(eigs, model, parity):
    """Asymptotic phases delta = -arctan(K) of continuum eigenstates.

    The continuum component of each E > 0 eigenstate is rebuilt in position
    space and fitted to A cos(k u) + B sin(k u) with k = sqrt(E m / hbar)
    over the asymptotic window |R - R_v| in [6 l, L/3].  States whose fit
    residual exceeds 5% of the component norm are flagged, not dropped.
    """
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    grid, pot = model.grid, model.potential
    nm, nk = pot.n_modes, grid.n_k

    md_parity = np.array(
        [lab[0] == "md" and lab[1] % 2 == (0 if parity == "even" else 1)
         for lab in eigs.labels]
    )
    chan = eigs.sector_mask(parity)
    sector_weight = (
        np.einsum("ij,ij->j", eigs.vectors[chan], eigs.vectors[chan])
        + np.einsum("ij,ij->j", eigs.vectors[md_parity], eigs.vectors[md_parity])
    )
    positive = eigs.energies > 0.0
    select = positive & (sector_weight > 0.5)
    if not np.any(select):
        raise ValueError("no positive-energy eigenstates in the requested channel")

    u_lo, u_hi = 6.0 * pot.length, grid.box_length / 3.0
    du = 0.25 / grid.kappa_max
    u = np.arange(u_lo, u_hi, du)
    basis = np.cos(np.outer(u, grid.kappas)) if parity == "even" else np.sin(
        np.outer(u, grid.kappas)
    )
    basis *= math.sqrt(2.0 / grid.box_length)
    psi = basis @ eigs.vectors[chan][:, select]

    energies = eigs.energies[select]
    ks = np.sqrt(energies / HBAR_OVER_M)
    raw = np.empty(len(energies))
    reliable = np.empty(len(energies), dtype=bool)
    for i, k in enumerate(ks):
        c, s = np.cos(k * u), np.sin(k * u)
        gram = np.array([[c @ c, c @ s], [c @ s, s @ s]])
        rhs = np.array([c @ psi[:, i], s @ psi[:, i]])
        a, b = np.linalg.solve(gram, rhs)
        resid = psi[:, i] - a * c - b * s
        norm = np.linalg.norm(psi[:, i])
        reliable[i] = norm > 0 and np.linalg.norm(resid) <= FIT_RESIDUAL_BOUND * norm
        raw[i] = -math.atan2(b, a)

    branch = (raw + 0.5 * math.pi) % math.pi - 0.5 * math.pi
    unwrapped = np.unwrap(branch, period=math.pi)
    dphase = np.gradient(unwrapped, energies)
    return PhaseCurve(energies=energies, phase=branch, unwrapped=unwrapped,
                      dphase_de=dphase, reliable=reliable, parity=parity)


@dataclass(frozen=True)
class NegativeDimeron:
    energy: float
    w_md: float
    w_se: float
    motional_overlap: float


@dataclass(frozen=True)
class PositiveDimeron:
    energy: float
    width: float  # Lorentzian FWHM of d(delta)/dE


@dataclass(frozen=True)
class MacrodimeronReport:
    negative: NegativeDimeron | None
    positive: PositiveDimeron | None


def _lorentzian(e, height, center, hwhm):
    return height * hwhm**2 / ((e - center) ** 2 + hwhm**2)


def fit_phase_resonance(curve, e_floor=0.5):
    """Lorentzian fit to the d(delta)/dE peak above a threshold cut.

    Returns (center, fwhm) or None when no usable peak exists.  The floor
    keeps the near-threshold points (where the finite box distorts the
    derivative) out of the peak search.
    """
    ok = curve.reliable & (curve.energies > e_floor)
    if not np.any(ok):
        return None
    e = curve.energies[ok]
    y = curve.dphase_de[ok]
    i0 = int(np.argmax(y))
    if y[i0] <= 0.0:
        return None
    half = y[i0] / 2.0
    lo = i0
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i0
    while hi < len(y) - 1 and y[hi] > half:
        hi += 1
    local_spacing = np.median(np.diff(e)) if len(e) > 1 else 1.0
    hwhm_est = max((e[hi] - e[lo]) / 2.0, local_spacing)
    # fit only the resonance core; the flanks carry non-Lorentzian
    # background from the continuum edge and neighboring structure
    window = (e > e[i0] - 2.0 * hwhm_est) & (e < e[i0] + 2.0 * hwhm_est)
    if window.sum() < 5:
        lo_i, hi_i = max(0, i0 - 3), min(len(e), i0 + 4)
        window = np.zeros(len(e), dtype=bool)
        window[lo_i:hi_i] = True
    try:
        popt, _ = curve_fit(
            _lorentzian, e[window], y[window],
            p0=(y[i0], e[i0], hwhm_est), maxfev=10000,
        )
    except RuntimeError:
        return None
    _, center, hwhm = popt
    return float(center), float(2.0 * abs(hwhm))


def find_macrodimerons(eigs, model, e_floor=0.5):
    """Locate the dressed bound state and the quasi-bound resonance.

    Negative dimeron: the lowest eigenstate with E < 0, reported with its
    sector populations and the overlap of its singly-excited motional part
    with the v=0 mode (normalized within the sector).  Positive dimeron:
    center and FWHM of the Lorentzian fitted to the even-channel phase
    derivative.  Either side degrades to None ('unresolved'), not an error.
    """
    negative = None
    if eigs.energies[0] < 0.0:
        vec = eigs.vectors[:, 0]
        w_md = float(eigs.sector_weights("md")[0])
        w_se = 1.0 - w_md
        f0 = franck_condon(model.potential, 0, model.grid, "even")
        even = vec[eigs.sector_mask("even")]
        overlap = float((f0 @ even) ** 2 / w_se) if w_se > 0 else 0.0
        negative = NegativeDimeron(
            energy=float(eigs.energies[0]), w_md=w_md, w_se=w_se,
            motional_overlap=overlap,
        )

    positive = None
    n_continuum = int(eigs.sector_mask("even").sum())
    if model.omega_c > 0.0 and n_continuum >= 10:
        curve = scattering_phases(eigs, model, "even")
        fit = fit_phase_resonance(curve, e_floor=e_floor)
        if fit is not None:
            positive = PositiveDimeron(energy=fit[0], width=fit[1])
    return MacrodimeronReport(negative=negative, positive=positive)


@dataclass(frozen=True)
class SplittingPoint:
    omega_c: float
    e_negative: float | None
    e_positive: float | None
    splitting: float | None


def splitting_curve(model, omega_c_values, threads=1):
    """Macrodimeron splitting E_pos - E_neg for a sweep of couplings.

    Unresolved dimerons propagate as None fields in the affected rows.
    """
    def one(omega_c):
        m = replace(model, omega_c=omega_c)
        report = find_macrodimerons(solve_two_atom(m), m)
        e_neg = report.negative.energy if report.negative else None
        e_pos = report.positive.energy if report.positive else None
        split = e_pos - e_neg if (e_neg is not None and e_pos is not None) else None
        return SplittingPoint(omega_c, e_neg, e_pos, split)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, omega_c_values))
    return [one(w) for w in omega_c_values]
