"""Shared machinery for stick spectra: binning, Gaussian broadening, peaks.

A spectrum is a set of (energy, weight) sticks from exact diagonalization.
Sticks are binned onto a uniform detuning axis and convolved with a unit-sum
discrete Gaussian kernel whose width models the laser linewidth, so the
broadened curve conserves the binned weight.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import TWO_PI
from .errors import ConfigurationError

DEFAULT_BROADENING = TWO_PI * 0.15  # rad/us, i.e. 150 kHz linear


@dataclass(frozen=True)
class SpectrumResult:
    """Probe spectrum on a detuning axis (all in rad/us).

    c_abs        binned raw absorption weight
    loss_signal  binned loss-weighted signal S = f * C_abs
    broadened    Gaussian-broadened loss signal
    """

    axis: np.ndarray
    c_abs: np.ndarray
    loss_signal: np.ndarray
    broadened: np.ndarray
    broadening: float


@dataclass(frozen=True)
class SpectralLine:
    center: float      # weighted centroid (rad/us)
    peak_position: float
    height: float


def uniform_axis(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    axis = lo + step * np.arange(n)
    if n < 2:
        raise ConfigurationError("spectrum axis needs at least two points")
    return axis


def bin_sticks(energies, weights, axis):
    """Nearest-bin histogram of sticks onto a uniform axis.

    Sticks outside the axis range are dropped; sum rules should be checked
    on the sticks themselves.
    """
    step = axis[1] - axis[0]
    idx = np.rint((np.asarray(energies) - axis[0]) / step).astype(int)
    keep = (idx >= 0) & (idx < len(axis))
    binned = np.zeros(len(axis))
    np.add.at(binned, idx[keep], np.asarray(weights)[keep])
    return binned


def gaussian_kernel(step, sigma):
    """Unit-sum discrete Gaussian kernel sampled on the axis spacing."""
    half = max(1, int(np.ceil(6.0 * sigma / step)))
    offsets = step * np.arange(-half, half + 1)
    kernel = np.exp(-0.5 * (offsets / sigma) ** 2)
    return kernel / kernel.sum()


def broaden(binned, step, sigma):
    return np.convolve(binned, gaussian_kernel(step, sigma), mode="same")


def kernel_density(energies, weights, at, sigma, step):
    """Broadened signal evaluated at a single point.

    Matches the binned-convolution normalization: the kernel carries the
    same unit-sum-per-step scaling, so values are comparable between scan
    protocols.
    """
    kernel = np.exp(-0.5 * ((at - np.asarray(energies)) / sigma) ** 2)
    norm = step / (sigma * np.sqrt(2.0 * np.pi))
    return float(np.sum(np.asarray(weights) * kernel) * norm)


def find_spectral_lines(axis, signal, prominence_frac=0.01, window_halfwidth=None):
    """Local maxima of a broadened curve with a relative prominence cut.

    A point counts as a line when it exceeds both neighbors and its
    prominence (height above the higher of the two flanking minima)
    exceeds prominence_frac * max(signal).  Line centers are weighted
    centroids within +-window_halfwidth of the peak.
    """
    signal = np.asarray(signal)
    if len(signal) < 3 or signal.max() <= 0.0:
        return []
    floor = prominence_frac * signal.max()
    step = axis[1] - axis[0]
    if window_halfwidth is None:
        window_halfwidth = 2.0 * DEFAULT_BROADENING
    half_bins = max(1, int(round(window_halfwidth / step)))

    peaks = []
    interior = np.flatnonzero(
        (signal[1:-1] > signal[:-2]) & (signal[1:-1] >= signal[2:])
    ) + 1
    for i in interior:
        # prominence: drop to the valley floor toward the nearest higher
        # point (or the array edge) on each side
        higher_left = np.flatnonzero(signal[:i] > signal[i])
        lo_edge = higher_left[-1] if higher_left.size else 0
        left_min = signal[lo_edge : i + 1].min()
        higher_right = np.flatnonzero(signal[i + 1 :] > signal[i])
        hi_edge = i + 1 + higher_right[0] if higher_right.size else len(signal) - 1
        right_min = signal[i : hi_edge + 1].min()
        prominence = signal[i] - max(left_min, right_min)
        if prominence < floor:
            continue
        lo = max(0, i - half_bins)
        hi = min(len(signal), i + half_bins + 1)
        weight = signal[lo:hi].sum()
        centroid = float(np.sum(axis[lo:hi] * signal[lo:hi]) / weight) if weight > 0 else axis[i]
        peaks.append(SpectralLine(center=centroid, peak_position=float(axis[i]), height=float(signal[i])))
    return peaks
