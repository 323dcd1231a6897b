"""Single-photon propagation through the medium.

Equations of motion (natural units, g(z) = g sqrt(n) w(z)):

    d_t f = -c d_z f + i g(z) e
    d_t e = -gamma e + i g(z) f + i G s
    d_t s = i G e - (kappa/2) s
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .darkstate import group_velocity_exact
from .errors import ConfigError, NumericalError, SetupError
from .grid import Grid1D, gaussian_envelope
from .params import PulseSpec, SystemParams
from .stepping import RK4_LIMIT, Advection, choose_steps, interaction_rate, rk4_step

OVERLAP_LIMIT = 1e-8
# fraction of the RK4 stability bound used when dt is not given
DEFAULT_SAFETY = 0.5


@dataclass
class AmplitudeField1:
    f: np.ndarray
    e: np.ndarray
    s: np.ndarray
    time: float = 0.0

    def norm(self, dz: float) -> float:
        return float((np.abs(self.f) ** 2 + np.abs(self.e) ** 2 + np.abs(self.s) ** 2).sum() * dz)

    def photon_norm(self, dz: float) -> float:
        return float((np.abs(self.f) ** 2).sum() * dz)

    def copy(self) -> "AmplitudeField1":
        return AmplitudeField1(self.f.copy(), self.e.copy(), self.s.copy(), self.time)


def initial_gaussian(grid: Grid1D, pulse: PulseSpec, c: float = 1.0) -> AmplitudeField1:
    """Normalised Gaussian photon packet with empty atomic amplitudes."""
    f = gaussian_envelope(grid, pulse.center, c * pulse.t_p)
    w = grid.mask()
    overlap = float((np.abs(f) ** 2 * w).sum() * grid.dz)
    if overlap > OVERLAP_LIMIT:
        raise SetupError(f"initial pulse overlaps the medium (weight {overlap:.3g})")
    zero = np.zeros_like(f)
    return AmplitudeField1(f, zero, zero.copy(), 0.0)


@dataclass
class Trajectory1:
    """Recorded output of a single-photon run."""

    grid: Grid1D
    params: SystemParams
    scheme: str
    dt: float
    times: np.ndarray
    norms: np.ndarray
    photon_norms: np.ndarray
    detectors: dict = field(default_factory=dict)
    snapshots: list = field(default_factory=list)
    initial: AmplitudeField1 | None = None
    final: AmplitudeField1 | None = None

    @property
    def norm_drift(self) -> float:
        return float(np.abs(self.norms - self.norms[0]).max())

    def detector(self, z_d: float) -> np.ndarray:
        return self.detectors[self.grid.index_of(z_d)]

    def snapshot_rows(self):
        z = self.grid.z
        for snap in self.snapshots:
            for j in range(len(z)):
                f = snap.f[j]
                yield (snap.time, z[j], f.real, f.imag, abs(f) ** 2,
                       abs(snap.e[j]) ** 2, abs(snap.s[j]) ** 2)


class Solver1:
    """RK4 integrator for the single-excitation amplitudes."""

    def __init__(self, grid: Grid1D, params: SystemParams, scheme: str = "spectral",
                 workers: int | None = None):
        if params.unit_system != "natural":
            raise ConfigError("solvers expect natural-unit parameters", "unit_system")
        try:
            self.adv = Advection(grid.n_points, grid.dz, params.c, scheme, workers)
        except ValueError as exc:
            raise ConfigError(str(exc), "scheme") from exc
        self.grid = grid
        self.p = params
        self.scheme = scheme
        self.g = params.gn_sqrt * grid.mask()

    @property
    def omega_max(self) -> float:
        p = self.p
        return (self.adv.max_rate + interaction_rate(p.G, self.g.max(), 1)
                + p.gamma + 0.5 * p.kappa)

    def stable_dt(self, safety: float = DEFAULT_SAFETY) -> float:
        dt = safety * RK4_LIMIT / self.omega_max
        if self.scheme == "upwind":
            dt = min(dt, 0.9 * self.grid.dz / self.p.c)
        return dt

    def check_dt(self, dt: float):
        if not dt > 0:
            raise ConfigError("time step must be positive", "dt")
        if self.scheme == "upwind" and self.p.c * dt / self.grid.dz > 0.9 + 1e-12:
            raise ConfigError(f"CFL number {self.p.c * dt / self.grid.dz:.3g} exceeds 0.9", "dt")
        if dt * self.omega_max > RK4_LIMIT:
            raise ConfigError(f"dt = {dt:.3g} exceeds the RK4 stability bound "
                              f"{RK4_LIMIT / self.omega_max:.3g}", "dt")

    def rhs(self, y):
        f, e, s = y
        p, g = self.p, self.g
        df = self.adv.apply(f, (0,)) + 1j * g * e
        de = 1j * g * f + 1j * p.G * s
        ds = 1j * p.G * e
        if p.gamma:
            de -= p.gamma * e
        if p.kappa:
            ds -= 0.5 * p.kappa * s
        return [df, de, ds]

    def step(self, state: AmplitudeField1, dt: float) -> AmplitudeField1:
        self.check_dt(dt)
        return self._step(state, dt)

    def _step(self, state, dt):
        f, e, s = rk4_step(self.rhs, [state.f, state.e, state.s], dt)
        if not np.isfinite(f).all():
            raise NumericalError(f"non-finite amplitude at t = {state.time + dt:.6g}")
        return AmplitudeField1(f, e, s, state.time + dt)

    def run(self, state: AmplitudeField1, t_end: float, dt: float | None = None,
            record_every: int = 1, snapshot_times=(), detectors=(),
            safety: float = DEFAULT_SAFETY) -> Trajectory1:
        """Integrate to ``t_end`` recording norms and the photon amplitude at detectors."""
        n_steps, dt = choose_steps(t_end - state.time, self.stable_dt(safety), dt)
        if n_steps == 0:
            raise SetupError("t_end must lie after the initial time")
        self.check_dt(dt)
        det_idx = [self.grid.index_of(z) for z in detectors]
        snap_steps = {int(round((t - state.time) / dt)): t for t in snapshot_times}
        dz = self.grid.dz
        times, norms, pnorms = [], [], []
        det = {i: [] for i in det_idx}
        snaps = []
        initial = state.copy()

        def record(st):
            times.append(st.time)
            norms.append(st.norm(dz))
            pnorms.append(st.photon_norm(dz))
            for i in det_idx:
                det[i].append(st.f[i])

        record(state)
        if 0 in snap_steps:
            snaps.append(state.copy())
        for n in range(1, n_steps + 1):
            state = self._step(state, dt)
            if n % record_every == 0 or n == n_steps:
                record(state)
            if n in snap_steps:
                snaps.append(state.copy())
        return Trajectory1(self.grid, self.p, self.scheme, dt, np.array(times), np.array(norms),
                           np.array(pnorms), {i: np.array(v) for i, v in det.items()}, snaps,
                           initial, state)


def step(state: AmplitudeField1, p: SystemParams, dt: float, grid: Grid1D,
         scheme: str = "spectral") -> AmplitudeField1:
    """Advance ``state`` by one RK4 step."""
    return Solver1(grid, p, scheme).step(state, dt)


@dataclass(frozen=True)
class AdiabaticPrediction:
    v1: float
    delay: float
    transit: float
    compression: float

    def output(self, z, t, pulse: PulseSpec, c: float = 1.0):
        """Predicted photon amplitude past the medium: the input shifted by ``delay``."""
        z0 = pulse.center + c * (t - self.delay)
        f = np.exp(-(((z - z0) / (c * pulse.t_p)) ** 2))
        return f / np.sqrt((np.abs(f) ** 2).sum() * (z[1] - z[0]))


def adiabatic_reference(pulse: PulseSpec, p: SystemParams) -> AdiabaticPrediction:
    """Lossless dark-state transport at the one-excitation group velocity."""
    v1 = group_velocity_exact(1, p.ratio)
    transit = p.L / (v1 * p.c)
    return AdiabaticPrediction(v1=v1, delay=transit - p.L / p.c, transit=transit, compression=v1)
