"""Two-excitation propagation on a 2D grid.

The two-excitation state is expanded as

    sum over pair fields X of  int dz1 dz2  X(z1, z2) |one quantum at z1, one at z2>

with six amplitude fields: ff (two photons), ef (excitation at z1, photon at
z2), ee, sf (spin wave at z1, photon at z2), es (excitation at z1, spin wave at
z2) and ss.  Each spin-wave quantum carries one cavity photon.  With this
normalisation the squared norm is the plain sum of the six integrals
int |X|^2, and ff, ee, ss are exchange symmetric.

The equations of motion are generated from :class:`EomCoefficients`, a table
of couplings checked against the lattice Hamiltonian before use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, DerivationError, DomainError, NumericalError, SetupError
from .grid import Grid1D
from .params import SystemParams
from .stepping import RK4_LIMIT, Advection, choose_steps, interaction_rate, rk4_step

FIELDS = ("ff", "ef", "ee", "sf", "es", "ss")
SYMMETRIC = ("ff", "ee", "ss")
SQRT2 = math.sqrt(2.0)
DEFAULT_SAFETY = 0.5
MEMORY_LIMIT_POINTS = 1024


@dataclass(frozen=True)
class Coupling:
    """d_t target += i * factor * K * source'.

    ``constant`` is ``"g"`` (g sqrt(n) w(z)) or ``"G"``.  For ``"g"`` the
    weight is evaluated at the target's ``row`` (first) or ``col`` (second)
    coordinate.  ``transpose`` means the source is read at swapped
    coordinates, source(z2, z1).
    """

    target: str
    source: str
    constant: str
    factor: float
    at: str | None = None
    transpose: bool = False

    @property
    def label(self) -> str:
        return f"{self.target}<-{self.source}" + ("^T" if self.transpose else "")


@dataclass(frozen=True)
class EomCoefficients:
    couplings: tuple
    # (number of excited-state quanta, number of cavity photons) per field
    decay: dict = field(default_factory=lambda: {
        "ff": (0, 0), "ef": (1, 0), "ee": (2, 0), "sf": (0, 1), "es": (1, 1), "ss": (0, 2)})
    # photon coordinates advected at speed c
    advect: dict = field(default_factory=lambda: {
        "ff": (0, 1), "ef": (1,), "ee": (), "sf": (1,), "es": (), "ss": ()})

    def by_label(self) -> dict:
        return {c.label: c for c in self.couplings}

    def with_factor(self, label: str, factor: float) -> "EomCoefficients":
        table = self.by_label()
        if label not in table:
            raise KeyError(label)
        return replace(self, couplings=tuple(replace(c, factor=factor) if c.label == label else c
                                             for c in self.couplings))

    def describe(self) -> str:
        """Human-readable equations of motion."""
        lines = []
        for name in FIELDS:
            ne, nc = self.decay[name]
            terms = []
            axes = self.advect[name]
            if axes:
                terms.append("-c(" + " + ".join(f"d{a + 1}" for a in axes) + ")" + name)
            rate = " + ".join(x for x in (f"{ne}gamma" if ne else "", f"{nc}kappa/2" if nc else "") if x)
            if rate:
                terms.append(f"-({rate}){name}")
            for c in self.couplings:
                if c.target != name:
                    continue
                k = c.constant if c.at is None else f"{c.constant}(z{1 if c.at == 'row' else 2})"
                arg = "(z2,z1)" if c.transpose else "(z1,z2)"
                terms.append(f"i*{c.factor:.6g}*{k}*{c.source}{arg}")
            lines.append(f"d_t {name} = " + " + ".join(terms))
        return "\n".join(lines)


def _table():
    r = 1.0 / SQRT2
    return (
        Coupling("ff", "ef", "g", r, "row"),
        Coupling("ff", "ef", "g", r, "col", True),
        Coupling("ef", "ff", "g", SQRT2, "row"),
        Coupling("ef", "ee", "g", SQRT2, "col"),
        Coupling("ef", "sf", "G", 1.0),
        Coupling("ee", "ef", "g", r, "col"),
        Coupling("ee", "ef", "g", r, "row", True),
        Coupling("ee", "es", "G", r),
        Coupling("ee", "es", "G", r, None, True),
        Coupling("sf", "ef", "G", 1.0),
        Coupling("sf", "es", "g", 1.0, "col", True),
        Coupling("es", "ee", "G", SQRT2),
        Coupling("es", "sf", "g", 1.0, "row", True),
        Coupling("es", "ss", "G", 2.0),
        Coupling("ss", "es", "G", 1.0),
        Coupling("ss", "es", "G", 1.0, None, True),
    )


def derive_eom(overrides: dict | None = None, validate: bool = True) -> EomCoefficients:
    """Coupling table of the two-excitation equations.

    ``overrides`` maps coupling labels to replacement factors (used for
    negative controls).  With ``validate`` the generator is compared with the
    lattice Hamiltonian and a :class:`DerivationError` lists every mismatched
    (target, source) block.
    """
    coeffs = EomCoefficients(_table())
    for label, value in (overrides or {}).items():
        try:
            coeffs = coeffs.with_factor(label, value)
        except KeyError:
            raise ConfigError(f"unknown coupling {label!r}", label) from None
    if validate:
        report = validate_eom(coeffs)
        bad = {k: v for k, v in report.items() if v > 1e-10}
        if bad:
            detail = ", ".join(f"{k}: {v:.3g}" for k, v in sorted(bad.items()))
            raise DerivationError(f"equations of motion disagree with the lattice model ({detail})",
                                  report)
    return coeffs


def validate_eom(coeffs: EomCoefficients, n_sites: int = 8, seed: int = 7) -> dict:
    """Relative generator error per (target, source) block on a small ring.

    Each source field is filled with random data in turn, the solver
    right-hand side is mapped to lattice amplitudes and compared with
    -i H psi of the brute-force Hamiltonian (non-uniform medium, all decay
    channels on).
    """
    from .lattice import ModeGrid, SectorBasis, build_hamiltonian, fields_to_state

    rng = np.random.default_rng(seed)
    grid = Grid1D(0.0, 1.0, n_sites)
    mask = rng.uniform(0.2, 1.0, n_sites)
    p = SystemParams(G=1.3, gn_sqrt=2.1, gamma=0.37, kappa=0.23)
    mg = ModeGrid(n_sites, grid.dz, True, mask)
    H = build_hamiltonian(mg, p, 2)
    basis = SectorBasis(2, n_sites)
    solver = Solver2(grid, p, coeffs=coeffs, mask=mask, _skip_checks=True)
    report = {}
    zero = np.zeros((n_sites, n_sites), dtype=complex)
    for src in FIELDS:
        x = rng.normal(size=(n_sites, n_sites)) + 1j * rng.normal(size=(n_sites, n_sites))
        if src in SYMMETRIC:
            x = x + x.T
        fields = {name: (x if name == src else zero) for name in FIELDS}
        rhs = dict(zip(FIELDS, solver.rhs([fields[n] for n in FIELDS])))
        lhs = fields_to_state(rhs, basis, grid.dz).amplitudes
        ref = -1j * (H @ fields_to_state(fields, basis, grid.dz).amplitudes)
        kinds = _kinds(basis)
        scale = np.linalg.norm(ref) or 1.0
        for tgt in FIELDS:
            sel = kinds == tgt
            report[f"{tgt}<-{src}"] = float(np.linalg.norm(lhs[sel] - ref[sel]) / scale)
    return report


def _kinds(basis):
    from .lattice import _pair_kinds

    return np.array([k for k, _, _ in _pair_kinds(basis)])


@dataclass
class AmplitudeField2:
    ff: np.ndarray
    ef: np.ndarray
    ee: np.ndarray
    sf: np.ndarray
    es: np.ndarray
    ss: np.ndarray
    time: float = 0.0

    def arrays(self):
        return [getattr(self, n) for n in FIELDS]

    def norm(self, dz: float) -> float:
        return float(sum((np.abs(a) ** 2).sum() for a in self.arrays()) * dz * dz)

    def asymmetry(self) -> float:
        return float(max(np.abs(getattr(self, n) - getattr(self, n).T).max() for n in SYMMETRIC))

    def copy(self) -> "AmplitudeField2":
        return AmplitudeField2(*[a.copy() for a in self.arrays()], time=self.time)


def product_state(f1: np.ndarray, f2: np.ndarray | None = None, dz: float = 1.0) -> AmplitudeField2:
    """Symmetrised, normalised two-photon product state of two envelopes."""
    f2 = f1 if f2 is None else f2
    ff = np.outer(f1, f2)
    ff = ff + ff.T
    ff = ff / math.sqrt((np.abs(ff) ** 2).sum() * dz * dz)
    zero = np.zeros_like(ff)
    return AmplitudeField2(ff, zero, zero.copy(), zero.copy(), zero.copy(), zero.copy(), 0.0)


def initial_pair(grid: Grid1D, pulse, c: float = 1.0) -> AmplitudeField2:
    """Two photons in the same Gaussian envelope, outside the medium."""
    from .solver1 import initial_gaussian

    f = initial_gaussian(grid, pulse, c).f
    return product_state(f, dz=grid.dz)


@dataclass
class DetectorRecord:
    """Time traces at one detector plane z_d.

    ``marginal`` is the one-photon density at z_d in the two-excitation
    state, 2 int|ff(z_d,z')|^2 + int|ef(z',z_d)|^2 + int|sf(z',z_d)|^2;
    ``diagonal`` is |ff(z_d, z_d)|^2.
    """

    position: float
    marginal: list = field(default_factory=list)
    diagonal: list = field(default_factory=list)


@dataclass
class Trajectory2:
    grid: Grid1D
    params: SystemParams
    scheme: str
    dt: float
    times: np.ndarray
    norms: np.ndarray
    photon_pair_norms: np.ndarray
    asymmetry: float
    detectors: dict
    snapshots: list
    initial: AmplitudeField2
    final: AmplitudeField2

    @property
    def norm_drift(self) -> float:
        return float(np.abs(self.norms - self.norms[0]).max())

    def detector(self, z_d: float) -> DetectorRecord:
        return self.detectors[self.grid.index_of(z_d)]

    def heatmap_rows(self):
        z = self.grid.z
        for t, ff in self.snapshots:
            a = np.abs(ff) ** 2
            for i in range(len(z)):
                for j in range(len(z)):
                    yield (t, z[i], z[j], a[i, j])

    def diagonal_rows(self):
        z = self.grid.z
        for t, ff in self.snapshots:
            d = np.abs(np.diag(ff)) ** 2
            for i in range(len(z)):
                yield (t, z[i], d[i])

    def antidiagonal_rows(self):
        """Cut z1 + z2 = const through the peak of the diagonal at each snapshot."""
        z, n = self.grid.z, self.grid.n_points
        for t, ff in self.snapshots:
            i0 = int(np.argmax(np.abs(np.diag(ff))))
            for m in range(-(n // 2), n // 2):
                i, j = (i0 + m) % n, (i0 - m) % n
                yield (t, m * self.grid.dz, z[i], z[j], abs(ff[i, j]) ** 2)


class Solver2:
    """RK4 integrator for the six two-excitation amplitude fields."""

    def __init__(self, grid: Grid1D, params: SystemParams, scheme: str = "spectral",
                 coeffs: EomCoefficients | None = None, workers: int | None = None,
                 mask: np.ndarray | None = None, _skip_checks: bool = False):
        if params.unit_system != "natural":
            raise ConfigError("solvers expect natural-unit parameters", "unit_system")
        if grid.n_points > MEMORY_LIMIT_POINTS and not _skip_checks:
            raise ConfigError(f"{grid.n_points}^2 grid exceeds the memory budget "
                              f"({MEMORY_LIMIT_POINTS}^2)", "n_points")
        try:
            self.adv = Advection(grid.n_points, grid.dz, params.c, scheme, workers)
        except ValueError as exc:
            raise ConfigError(str(exc), "scheme") from exc
        self.grid = grid
        self.p = params
        self.scheme = scheme
        self.coeffs = coeffs if coeffs is not None else _frozen_coefficients()
        w = grid.mask() if mask is None else np.asarray(mask, dtype=float)
        self.g = params.gn_sqrt * w
        self._g_row = self.g[:, None]
        self._g_col = self.g[None, :]
        self._rates = {name: ne * params.gamma + 0.5 * nc * params.kappa
                       for name, (ne, nc) in self.coeffs.decay.items()}

    @property
    def omega_max(self) -> float:
        p = self.p
        return (2.0 * self.adv.max_rate + interaction_rate(p.G, self.g.max(), 2)
                + 2.0 * p.gamma + p.kappa)

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
        src = dict(zip(FIELDS, y))
        out = {}
        for name in FIELDS:
            axes = self.coeffs.advect[name]
            rate = self._rates[name]
            d = self.adv.apply(src[name], axes) if axes else None
            if rate:
                d = -rate * src[name] if d is None else d - rate * src[name]
            out[name] = d
        G = self.p.G
        for c in self.coeffs.couplings:
            s = src[c.source].T if c.transpose else src[c.source]
            if c.constant == "G":
                term = (1j * c.factor * G) * s
            else:
                k = self._g_row if c.at == "row" else self._g_col
                term = (1j * c.factor * k) * s
            if out[c.target] is None:
                out[c.target] = term
            else:
                out[c.target] += term
        return [out[n] if out[n] is not None else np.zeros_like(src[n]) for n in FIELDS]

    def step(self, state: AmplitudeField2, dt: float) -> AmplitudeField2:
        self.check_dt(dt)
        return self._step(state, dt)

    def _step(self, state, dt):
        y = rk4_step(self.rhs, state.arrays(), dt)
        for k, name in enumerate(FIELDS):
            if name in SYMMETRIC:
                y[k] = 0.5 * (y[k] + y[k].T)
        if not np.isfinite(y[0]).all():
            raise NumericalError(f"non-finite amplitude at t = {state.time + dt:.6g}")
        return AmplitudeField2(*y, time=state.time + dt)

    def run(self, state: AmplitudeField2, t_end: float, dt: float | None = None,
            record_every: int = 1, snapshot_times=(), detectors=(),
            safety: float = DEFAULT_SAFETY) -> Trajectory2:
        n_steps, dt = choose_steps(t_end - state.time, self.stable_dt(safety), dt)
        if n_steps == 0:
            raise SetupError("t_end must lie after the initial time")
        self.check_dt(dt)
        dz = self.grid.dz
        det = {self.grid.index_of(z): DetectorRecord(z) for z in detectors}
        snap_steps = {int(round((t - state.time) / dt)) for t in snapshot_times}
        times, norms, pair = [], [], []
        snaps = []
        asym = 0.0
        initial = state.copy()

        def record(st):
            times.append(st.time)
            norms.append(st.norm(dz))
            pair.append(float((np.abs(st.ff) ** 2).sum() * dz * dz))
            for i, rec in det.items():
                rec.marginal.append(dz * (2.0 * (np.abs(st.ff[i]) ** 2).sum()
                                          + (np.abs(st.ef[:, i]) ** 2).sum()
                                          + (np.abs(st.sf[:, i]) ** 2).sum()))
                rec.diagonal.append(abs(st.ff[i, i]) ** 2)

        record(state)
        if 0 in snap_steps:
            snaps.append((state.time, state.ff.copy()))
        for n in range(1, n_steps + 1):
            state = self._step(state, dt)
            if n % record_every == 0 or n == n_steps:
                record(state)
                asym = max(asym, state.asymmetry())
            if n in snap_steps:
                snaps.append((state.time, state.ff.copy()))
        for rec in det.values():
            rec.marginal = np.array(rec.marginal)
            rec.diagonal = np.array(rec.diagonal)
        return Trajectory2(self.grid, self.p, self.scheme, dt, np.array(times), np.array(norms),
                           np.array(pair), asym, det, snaps, initial, state)


_FROZEN = None


def _frozen_coefficients() -> EomCoefficients:
    """Validated table, derived once per process."""
    global _FROZEN
    if _FROZEN is None:
        _FROZEN = derive_eom()
    return _FROZEN


def step2(state: AmplitudeField2, p: SystemParams, dt: float, grid: Grid1D,
          scheme: str = "spectral") -> AmplitudeField2:
    return Solver2(grid, p, scheme).step(state, dt)


# ---------------------------------------------------------------------------
# piecewise-velocity arrival model

@dataclass(frozen=True)
class KinematicArrivals:
    """Exit times of the leading and trailing photon, counted from the
    leading photon's entry into the medium."""

    t1: float
    t2: float
    separated: bool

    @property
    def transit1(self) -> float:
        return self.t1


def kinematic_delay_model(d: float, p: SystemParams) -> KinematicArrivals:
    """Arrival times of two photons entering a distance ``d`` apart.

    Inside the medium a lone photon moves at v1 and a pair at v2.  The
    separation shrinks to d' = d v1/c on entry; if d' >= L the leading photon
    leaves before the second one enters and both cross at v1.
    """
    from .darkstate import group_velocity_exact

    if d < 0:
        raise DomainError("separation must be non-negative")
    r = p.ratio
    v1 = group_velocity_exact(1, r) * p.c
    v2 = group_velocity_exact(2, r) * p.c
    d_in = d * v1 / p.c
    if d_in < p.L:
        t1 = d / p.c + (p.L - d_in) / v2
        return KinematicArrivals(t1, t1 + d / p.c, False)
    return KinematicArrivals(p.L / v1, d / p.c + p.L / v1, True)


def kinematic_arrivals(offsets, p: SystemParams) -> np.ndarray:
    """Event-driven exit times for any number of photons.

    ``offsets`` are distances behind the leading photon at the moment it
    enters.  Every photon inside the medium moves at v(m), m being the
    number of photons currently inside.
    """
    from .darkstate import group_velocity_exact

    x = -np.asarray(offsets, dtype=float)
    if np.any(x > 0):
        raise DomainError("offsets must be non-negative")
    n = len(x)
    speeds = {m: group_velocity_exact(m, p.ratio) * p.c for m in range(1, n + 1)}
    exit_t = np.full(n, np.nan)
    t = 0.0
    eps = 1e-12 * p.L
    while np.isnan(exit_t).any():
        inside = (x >= -eps) & (x < p.L - eps)
        m = int(inside.sum())
        v = np.where(inside, speeds.get(m, p.c), p.c)
        active = np.isnan(exit_t)
        # time to the next boundary crossing of any active photon
        to_entry = np.where(active & (x < -eps), -x / v, np.inf)
        to_exit = np.where(active & inside, (p.L - x) / v, np.inf)
        dt = min(to_entry.min(), to_exit.min())
        x = x + v * dt
        t += dt
        done = active & (x >= p.L - eps)
        exit_t[done] = t
        x[done] = np.inf
    return exit_t
