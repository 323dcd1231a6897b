"""Self-checks behind ``cit-filter validate``.

Every suite returns a :class:`CheckResult`; ``run_validation`` collects them
into a pass/fail matrix.  The ``overrides`` hook replaces two-excitation
coupling factors so that a deliberately wrong equation of motion can be shown
to fail the oracle comparison.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .darkstate import dark_state_residual
from .grid import Grid1D, gaussian_envelope
from .lattice import (ModeGrid, SectorBasis, build_hamiltonian, evolve, fields_to_state,
                      state_to_fields)
from .observables import field_expectations, lattice_expectations
from .params import SystemParams
from .solver1 import AmplitudeField1, Solver1
from .solver2 import FIELDS, Solver2, derive_eom, product_state, validate_eom

DARK_RATIOS = (0.1, 0.3, 1.0, 3.0)
DARK_MAX_N = 6
DARK_TOL = 1e-12
EOM_TOL = 1e-10
ORACLE_TOL = 1e-2
COMPOSITION_TOL = 1e-10
DRIFT_TOL = {1: 1e-6, 2: 1e-5}


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tolerance: float
    seconds: float = 0.0
    detail: str = ""

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return (f"{flag}  {self.name:22s} {self.value:.3e} (tol {self.tolerance:.0e}, "
                f"{self.seconds:.1f} s) {self.detail}").rstrip()


def _result(name, value, tol, t0, detail=""):
    return CheckResult(name, bool(value <= tol), float(value), tol, time.perf_counter() - t0,
                       detail)


def _l2(a, ref):
    return float(np.sqrt(((a - ref) ** 2).sum() / (ref ** 2).sum()))


# ---------------------------------------------------------------------------
# oracle comparisons

def oracle_sector1(n_sites: int = 64, samples: int = 40, p: SystemParams | None = None,
                   safety: float = 0.5):
    """Max relative L2 error of the photon density, solver vs lattice, sector 1."""
    p = p or SystemParams(G=3.0, gn_sqrt=4.0)
    grid = Grid1D(0.0, 4.0, n_sites)
    f = gaussian_envelope(grid, 2.0, 0.4)
    state = AmplitudeField1(f, np.zeros_like(f), np.zeros_like(f))
    solver = Solver1(grid, p)
    dt = solver.stable_dt(safety)
    stride = max(1, int(round(0.1 / dt)))
    times = dt * stride * np.arange(samples + 1)
    tr = solver.run(state, times[-1], dt=dt, snapshot_times=times)
    mg = ModeGrid.from_grid(grid)
    lt = evolve(fields_to_state({"f": f, "e": 0 * f, "s": 0 * f}, SectorBasis(1, n_sites), grid.dz),
                build_hamiltonian(mg, p, 1), dt, stride * samples, stride=stride, grid=mg)
    return max(_l2(np.abs(sn.f) ** 2, lt.photon_density(i)) for i, sn in enumerate(tr.snapshots))


def oracle_sector2(n_sites: int = 32, samples: int = 40, p: SystemParams | None = None,
                   overrides: dict | None = None, safety: float = 0.5):
    """Max relative L2 error of |ff|^2, solver vs lattice, sector 2."""
    p = p or SystemParams(G=2.0, gn_sqrt=3.0)
    grid = Grid1D(0.0, 4.0, n_sites)
    f1 = gaussian_envelope(grid, 1.3, 0.5)
    f2 = gaussian_envelope(grid, 2.6, 0.5)
    state = product_state(f1, f2, grid.dz)
    coeffs = derive_eom(overrides, validate=False) if overrides else None
    solver = Solver2(grid, p, coeffs=coeffs)
    dt = solver.stable_dt(safety)
    stride = max(1, int(round(0.1 / dt)))
    times = dt * stride * np.arange(samples + 1)
    tr = solver.run(state, times[-1], dt=dt, snapshot_times=times)
    mg = ModeGrid.from_grid(grid)
    fields = {k: getattr(state, k) for k in FIELDS}
    lt = evolve(fields_to_state(fields, SectorBasis(2, n_sites), grid.dz),
                build_hamiltonian(mg, p, 2), dt, stride * samples, stride=stride, grid=mg)
    errs = []
    for i, (_, ff) in enumerate(tr.snapshots):
        ref = np.abs(state_to_fields(lt.state(i), grid.dz)["ff"]) ** 2
        errs.append(_l2(np.abs(ff) ** 2, ref))
    return max(errs)


def composition_error(n_sites: int = 8, seed: int = 3) -> float:
    """Field formulas for <E+E> and <E+E+EE> against Fock-space expectations."""
    rng = np.random.default_rng(seed)
    dz = 1.0 / n_sites

    def rand(shape, sym=False):
        x = rng.normal(size=shape) + 1j * rng.normal(size=shape)
        return x + x.T if sym else x

    f1 = {"f": rand(n_sites), "e": rand(n_sites), "s": rand(n_sites)}
    s1 = fields_to_state(f1, SectorBasis(1, n_sites), dz)
    s1.amplitudes /= np.linalg.norm(s1.amplitudes)
    f2 = {k: rand((n_sites, n_sites), k in ("ff", "ee", "ss")) for k in FIELDS}
    s2 = fields_to_state(f2, SectorBasis(2, n_sites), dz)
    s2.amplitudes /= np.linalg.norm(s2.amplitudes)
    alpha = 0.4 + 0.3j
    fields1 = state_to_fields(s1, dz)
    fields2 = state_to_fields(s2, dz)
    err = 0.0
    for site in range(n_sites):
        a = np.array(field_expectations(alpha, fields1, fields2, site, dz))
        b = np.array(lattice_expectations(alpha, s1, s2, site, dz))
        err = max(err, float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))))
    return err


def norm_drift_runs(quick: bool = False):
    """Norm drift of lossless runs through a finite medium, one per sector."""
    p = SystemParams(G=50.0, gn_sqrt=50.0)
    n1 = 256 if quick else 512
    g1 = Grid1D(0.0, 4.0, n1, 1.5, 2.5)
    f = gaussian_envelope(g1, 0.75, 0.25)
    tr1 = Solver1(g1, p).run(AmplitudeField1(f, 0 * f, 0 * f), 3.0)
    n2 = 64 if quick else 96
    g2 = Grid1D(0.0, 4.0, n2, 1.5, 2.5)
    f = gaussian_envelope(g2, 0.75, 0.3)
    tr2 = Solver2(g2, p).run(product_state(f, dz=g2.dz), 3.0)
    return tr1.norm_drift, tr2.norm_drift


# ---------------------------------------------------------------------------

def run_validation(quick: bool = False, overrides: dict | None = None) -> list:
    results = []

    t0 = time.perf_counter()
    worst = max(dark_state_residual(N, SystemParams(G=r, gn_sqrt=1.0))
                for N in range(1, DARK_MAX_N + 1) for r in DARK_RATIOS)
    results.append(_result("dark_state_residual", worst, DARK_TOL, t0))

    t0 = time.perf_counter()
    report = validate_eom(derive_eom(overrides, validate=False))
    label, err = max(report.items(), key=lambda kv: kv[1])
    results.append(_result("eom_coefficients", err, EOM_TOL, t0, f"worst block {label}"))

    # coarse quick grids allow a longer step; shorten it so time error stays small
    safety = 0.25 if quick else 0.5
    t0 = time.perf_counter()
    results.append(_result("oracle_sector1",
                           oracle_sector1(32 if quick else 64, 20 if quick else 40, safety=safety),
                           ORACLE_TOL, t0))

    t0 = time.perf_counter()
    results.append(_result("oracle_sector2",
                           oracle_sector2(16 if quick else 32, 20 if quick else 40,
                                          overrides=overrides, safety=safety),
                           ORACLE_TOL, t0))

    t0 = time.perf_counter()
    results.append(_result("composition", composition_error(), COMPOSITION_TOL, t0))

    t0 = time.perf_counter()
    d1, d2 = norm_drift_runs(quick)
    r1 = _result("norm_drift_sector1", d1, DRIFT_TOL[1], t0)
    r2 = _result("norm_drift_sector2", d2, DRIFT_TOL[2], t0)
    results += [r1, r2]
    return results
