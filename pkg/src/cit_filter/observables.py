"""Weak coherent pulse observables built from the one- and two-excitation runs.

The input state is the coherent state truncated at two photons,

    |0> + alpha |1_f> + (alpha^2 / sqrt 2) |2_ff>,

with |2_ff> the normalised two-photon state of the same envelope.  Because
the dynamics conserve the excitation number, the detector expectations split
into sector contributions without cross terms:

    <E+E>(z)     = |alpha|^2 |f(z)|^2 + (|alpha|^4 / 2) m(z)
    <E+E+EE>(z)  = |alpha|^4 |ff(z, z)|^2

where m(z) = 2 int|ff(z,z')|^2 + int|ef(z',z)|^2 + int|sf(z',z)|^2 is the
one-photon density of the two-excitation state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ExtractionError, SetupError

MAX_MEAN_PHOTONS = 0.5
ENVELOPE_TOL = 1e-8
CHANNELS = ("intensity", "g2_unnorm")


@dataclass
class ObservableSeries:
    times: np.ndarray
    intensity: np.ndarray
    g2_unnorm: np.ndarray
    sector1_norm: np.ndarray
    sector2_norm: np.ndarray
    alpha: complex = 0.0
    z_d: float = 0.0

    def channel(self, name: str) -> np.ndarray:
        if name not in CHANNELS:
            raise SetupError(f"unknown channel {name!r}")
        return getattr(self, name)

    def peak_time(self, name: str) -> float:
        return peak_time(self.times, self.channel(name))

    def centroid_time(self, name: str) -> float:
        return centroid_time(self.times, self.channel(name))

    def rows(self):
        return zip(self.times, self.intensity, self.g2_unnorm, self.sector1_norm,
                   self.sector2_norm)


def _check_envelopes(traj1, traj2):
    f0 = traj1.initial.f
    ff0 = traj2.initial.ff
    if ff0.shape != (len(f0), len(f0)):
        raise SetupError("trajectories live on different grids")
    dz = traj1.grid.dz
    prod = np.outer(f0, f0)
    prod = prod / np.sqrt((np.abs(prod) ** 2).sum() * dz * dz)
    err = np.sqrt((np.abs(ff0 - prod) ** 2).sum() * dz * dz)
    others = sum(np.abs(a).max() for a in traj2.initial.arrays()[1:])
    if err > ENVELOPE_TOL or others > 0:
        raise SetupError(f"two-photon input is not the product of the one-photon envelope "
                         f"(mismatch {err:.3g})")


def compose_coherent(alpha: complex, traj1, traj2, z_d: float) -> ObservableSeries:
    """Detector traces of the truncated coherent state (see module docstring)."""
    a2 = abs(alpha) ** 2
    if a2 > MAX_MEAN_PHOTONS:
        raise SetupError(f"|alpha|^2 = {a2:.3g} is too large for the two-photon truncation")
    _check_envelopes(traj1, traj2)
    if len(traj1.times) != len(traj2.times) or np.abs(traj1.times - traj2.times).max() > 1e-9:
        raise SetupError("trajectories are sampled on different time grids")
    f = traj1.detector(z_d)
    rec = traj2.detector(z_d)
    intensity = a2 * np.abs(f) ** 2 + 0.5 * a2 * a2 * rec.marginal
    g2 = a2 * a2 * rec.diagonal
    return ObservableSeries(np.asarray(traj1.times), intensity, g2, np.asarray(traj1.norms),
                            np.asarray(traj2.norms), complex(alpha), float(z_d))


def field_expectations(alpha: complex, fields1: dict, fields2: dict, i: int, dz: float):
    """Intensity and g2 at grid index ``i`` from field snapshots.

    Same formulas as :func:`compose_coherent`, for a single time.
    """
    a2 = abs(alpha) ** 2
    m = dz * (2.0 * (np.abs(fields2["ff"][i]) ** 2).sum() + (np.abs(fields2["ef"][:, i]) ** 2).sum()
              + (np.abs(fields2["sf"][:, i]) ** 2).sum())
    return (a2 * abs(fields1["f"][i]) ** 2 + 0.5 * a2 * a2 * m,
            a2 * a2 * abs(fields2["ff"][i, i]) ** 2)


def lattice_expectations(alpha: complex, state1, state2, site: int, dz: float):
    """<E+E> and <E+E+EE> at ``site`` evaluated directly in Fock space.

    The truncated coherent state is assembled in the joint vacuum + one +
    two excitation basis and the photon operators are applied as matrices,
    independent of the field bookkeeping above.
    """
    from .fock import FockBasis, Term

    b1, b2 = state1.basis, state2.basis
    states = [()] + list(b1.fock.states) + list(b2.fock.states)
    joint = FockBasis(states)
    psi = np.zeros(len(joint), dtype=complex)
    psi[0] = 1.0 - 0.5 * abs(alpha) ** 2
    psi[1:1 + len(b1)] = alpha * state1.amplitudes
    psi[1 + len(b1):] = alpha ** 2 / np.sqrt(2.0) * state2.amplitudes
    j = b1.photon(site)
    n1 = joint.operator([Term(1.0, (j,), (j,))])
    n2 = joint.operator([Term(1.0, (j, j), (j, j))])
    return (float(np.real(np.vdot(psi, n1 @ psi))) / dz,
            float(np.real(np.vdot(psi, n2 @ psi))) / dz ** 2)


# ---------------------------------------------------------------------------
# time-trace analysis

def _check_trace(t, a):
    t = np.asarray(t, dtype=float)
    a = np.asarray(a, dtype=float)
    if len(t) != len(a) or len(t) < 3:
        raise ExtractionError("need at least three samples")
    top = np.abs(a).max()
    if top == 0 or a.max() - a.min() <= 1e-12 * top:
        raise ExtractionError("flat series has no peak")
    return t, a


def peak_time(t, a) -> float:
    """Time of the maximum, refined by a parabola through the top three samples."""
    t, a = _check_trace(t, a)
    i = int(np.argmax(a))
    if i == 0 or i == len(a) - 1:
        raise ExtractionError("maximum lies at the edge of the time window")
    y0, y1, y2 = a[i - 1], a[i], a[i + 1]
    den = y0 - 2.0 * y1 + y2
    shift = 0.5 * (y0 - y2) / den if den != 0 else 0.0
    return float(t[i] + shift * (t[i + 1] - t[i]))


def centroid_time(t, a) -> float:
    t, a = _check_trace(t, a)
    return float((t * a).sum() / a.sum())


def fwhm(x, a) -> float:
    """Full width at half maximum with linear interpolation of the crossings."""
    x, a = _check_trace(x, a)
    i = int(np.argmax(a))
    half = 0.5 * a[i]
    lo = i
    while lo > 0 and a[lo] > half:
        lo -= 1
    hi = i
    while hi < len(a) - 1 and a[hi] > half:
        hi += 1
    if a[lo] > half or a[hi] > half:
        raise ExtractionError("peak is not contained in the window")
    left = x[lo] + (half - a[lo]) / (a[lo + 1] - a[lo]) * (x[lo + 1] - x[lo])
    right = x[hi - 1] + (half - a[hi - 1]) / (a[hi] - a[hi - 1]) * (x[hi] - x[hi - 1])
    return float(right - left)


@dataclass(frozen=True)
class DelayStats:
    peak_delay: float
    centroid_delay: float
    uncertainty: float


def extract_delay(series: ObservableSeries, reference: ObservableSeries,
                  channel: str = "intensity", reference_channel: str | None = None) -> DelayStats:
    """Delay of ``series.channel`` relative to ``reference.reference_channel``.

    Positive values mean the series arrives later.  The uncertainty is the
    sampling interval.
    """
    reference_channel = reference_channel or channel
    t = np.asarray(series.times)
    if len(t) != len(reference.times) or np.abs(t - reference.times).max() > 1e-9:
        raise ExtractionError("series are not sampled on a common time grid")
    a, b = series.channel(channel), reference.channel(reference_channel)
    dt = float(np.median(np.diff(t)))
    return DelayStats(peak_time(t, a) - peak_time(t, b),
                      centroid_time(t, a) - centroid_time(t, b), dt)
