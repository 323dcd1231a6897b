"""End-to-end pipelines used by the command line and the acceptance suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import next_fast_len
from scipy.signal import find_peaks

from .darkstate import group_velocity_exact
from .errors import ExtractionError
from .grid import Grid1D, gaussian_envelope
from .observables import (ObservableSeries, centroid_time, compose_coherent, extract_delay,
                          fwhm)
from .params import (PulseSpec, SystemParams, check_conditions, derive_quantities,
                     with_reduced_light_speed)
from .solver1 import Solver1, initial_gaussian
from .solver2 import Solver2, kinematic_delay_model, product_state

# ---------------------------------------------------------------------------
# single-photon transport


@dataclass
class TransportResult:
    transmission: float
    transit: float
    expected_transit: float
    compression: float
    expected_compression: float
    final_norm: float
    norm_drift: float
    trajectory: object = field(repr=False, default=None)


def single_photon_transport(p: SystemParams, grid: Grid1D, pulse: PulseSpec, dt=None,
                            safety: float = 0.8, record_every: int = 2,
                            t_end: float | None = None, extra_snapshots=()) -> TransportResult:
    """Send a Gaussian through the medium and measure delay, compression and loss.

    The transit time is L/c plus the centroid delay at the detector relative to
    free flight.  Compression is the FWHM ratio of |f|^2 when the pulse centre
    is at the medium centre.  Transmission is the photon number crossing the
    detector, c * int |f(z_d, t)|^2 dt.
    """
    v1 = group_velocity_exact(1, p.ratio)
    z_d = grid.detector
    entry = (grid.z_in - pulse.center) / p.c
    t_mid = entry + 0.5 * grid.length / (v1 * p.c)
    if t_end is None:
        t_end = entry + grid.length / (v1 * p.c) + (z_d - grid.z_out) / p.c + 4.0 * pulse.t_p
    solver = Solver1(grid, p)
    tr = solver.run(initial_gaussian(grid, pulse, p.c), t_end, dt=dt, safety=safety,
                    record_every=record_every, detectors=[z_d],
                    snapshot_times=(0.0, t_mid) + tuple(extra_snapshots))
    t = tr.times
    flux = np.abs(tr.detector(z_d)) ** 2
    transmission = float(p.c * np.trapezoid(flux, t))
    delay = centroid_time(t, flux) - (z_d - pulse.center) / p.c
    width0 = fwhm(grid.z, np.abs(tr.snapshots[0].f) ** 2)
    mid = tr.snapshots[1]
    compression = fwhm(grid.z, np.abs(mid.f) ** 2) / width0
    return TransportResult(transmission, grid.length / p.c + delay, grid.length / (v1 * p.c),
                           compression, v1, float(tr.norms[-1]), tr.norm_drift, tr)


# ---------------------------------------------------------------------------
# two-photon arrival structure


@dataclass
class PairArrival:
    separation: float
    t1: float
    t2: float
    model_t1: float
    model_t2: float
    diagonal_transit: float | None
    norm_final: float
    trajectory: object = field(repr=False, default=None)


PAIR_PARAMS = SystemParams(G=150.0, gn_sqrt=150.0, gamma=1.0)


def pair_arrival(d: float, p: SystemParams = PAIR_PARAMS, width: float = 0.1,
                 points_per_length: int = 60, safety: float = 0.8) -> PairArrival:
    """Two narrow photon packets, the trailing one ``d`` behind the leading one.

    Times are exit times counted from the leading photon's entry into the
    medium, read off the detector trace.  For d = 0 the transit of the
    coincident (z1 = z2) amplitude is reported as well.
    """
    L = p.L
    z0, z_in = 4.0 * width, 8.0 * width
    z_out = z_in + L
    size = max(z_out + 0.6 * L, d + 2.05 * L)
    n = next_fast_len(int(math.ceil(size * points_per_length)))
    grid = Grid1D(0.0, size, n, z_in, z_out)
    lead = gaussian_envelope(grid, z0, width)
    trail = gaussian_envelope(grid, (z0 - d) % size, width)
    model = kinematic_delay_model(d, p)
    z_d = grid.detector
    offset = (z_in - z0) / p.c + (z_d - z_out) / p.c
    t_end = offset + model.t2 + 6.0 * width / p.c
    tr = Solver2(grid, p).run(product_state(lead, trail, grid.dz), t_end, safety=safety,
                              record_every=2, detectors=[z_d])
    t = tr.times
    rec = tr.detector(z_d)
    diag = None
    if d == 0:
        t1 = t2 = centroid_time(t, rec.marginal) - offset
        diag = centroid_time(t, rec.diagonal) - offset
    else:
        a = rec.marginal
        peaks, props = find_peaks(a, prominence=0.05 * a.max())
        if len(peaks) < 2:
            raise ExtractionError("could not resolve two arrivals in the detector trace")
        top = np.sort(peaks[np.argsort(props["prominences"])[-2:]])
        cut = top[0] + int(np.argmin(a[top[0]:top[1] + 1]))
        t1 = centroid_time(t[:cut], a[:cut]) - offset
        t2 = centroid_time(t[cut:], a[cut:]) - offset
    return PairArrival(d, t1, t2, model.t1, model.t2, diag, float(tr.norms[-1]), tr)


# ---------------------------------------------------------------------------
# weak coherent pulse after the medium


@dataclass
class CoherentPulseResult:
    series: ObservableSeries
    advance_peak: float
    advance_centroid: float
    uncertainty: float
    delta_tau_model: float
    delta_tau_physical: float
    time_unit: float
    sim_params: SystemParams
    conditions: object
    trajectories: tuple = field(repr=False, default=())


def coherent_pulse_run(phys: SystemParams, pulse: PulseSpec, light_speed_ratio: float = 0.1,
                       points_per_width: float = 3.0, kappa_in_dynamics: bool = False,
                       safety: float = 0.8, record_every: int = 4) -> CoherentPulseResult:
    """Weak coherent pulse through the medium with a lowered speed of light.

    The free-space transit L/c of a real medium is many orders of magnitude
    shorter than the pulse, so c is lowered until (G / g sqrt(n))^2 equals
    ``light_speed_ratio`` while G, gamma, kappa and OD stay fixed in physical
    time units.  All times are then in units of the reduced L/c
    (``time_unit`` seconds).  The grid resolves the compressed pulse with
    ``points_per_width`` points per 1/e half-width.
    """
    sim = with_reduced_light_speed(phys, light_speed_ratio)
    if not kappa_in_dynamics:
        sim = SystemParams(G=sim.G, gn_sqrt=sim.gn_sqrt, gamma=sim.gamma)
    derived = derive_quantities(sim)
    # one natural time unit is the reduced L/c, in seconds
    time_unit = derive_quantities(phys).od * phys.gamma * light_speed_ratio / phys.G ** 2
    t_p = pulse.t_p / time_unit
    half = 3.2 * t_p
    points_per_length = points_per_width / (derived.v1 * t_p)
    ramp = 4.0 / points_per_length
    z0, z_in = half, 2.0 * half + 0.5
    z_out = z_in + 1.0
    size = z_out + 3.0 * ramp + 0.5
    n = next_fast_len(int(math.ceil(size * points_per_length)))
    grid = Grid1D(0.0, size, n, z_in, z_out)
    sim_pulse = PulseSpec(t_p, z0, pulse.mean_photons)
    state1 = initial_gaussian(grid, sim_pulse)
    z_d = grid.detector
    t_end = (z_in - z0) + 1.0 / derived.v1 + (z_d - z_out) + half + 0.5
    s2 = Solver2(grid, sim)
    dt = s2.stable_dt(safety)
    tr1 = Solver1(grid, sim).run(state1, t_end, dt=dt, record_every=record_every, detectors=[z_d])
    tr2 = s2.run(product_state(state1.f, dz=grid.dz), t_end, dt=dt, record_every=record_every,
                 detectors=[z_d])
    series = compose_coherent(math.sqrt(pulse.mean_photons), tr1, tr2, z_d)
    stats = extract_delay(series, series, "intensity", "g2_unnorm")
    return CoherentPulseResult(series, stats.peak_delay, stats.centroid_delay, stats.uncertainty,
                               derived.delta_tau_12, derive_quantities(phys).delta_tau_12 / time_unit,
                               time_unit, sim, check_conditions(phys, pulse), (tr1, tr2))
