"""Brute-force lattice oracle.

The probe field lives on ``n`` sites of a ring (photon modes ``b_j``), each
site carries a collective excited mode ``p_j`` and spin mode ``s_j`` with
coupling weight ``w_j``, and a single cavity mode ``a`` is shared by all
sites.  The Hamiltonian (zero detunings, hbar = 1) is

    H = sum_jl h_jl b_j^+ b_l - sum_j [g w_j (b_j^+ p_j + h.c.)
        + G (a^+ s_j^+ p_j + h.c.)] - i gamma sum_j p_j^+ p_j - i kappa/2 a^+ a

with ``h`` the discretised free-field dispersion.  It is built explicitly
in the one- and two-excitation sectors and evolved exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement

import numpy as np
from scipy import sparse
from scipy.linalg import expm
from scipy.sparse.linalg import expm_multiply

from .errors import CapacityError, NumericalError, SetupError, WindowError
from .fock import FockBasis, Term, hermitian_pair
from .grid import Grid1D

MAX_DIMENSION = 200_000
DENSE_LIMIT = 3000

PHOTON, EXCITED, SPIN = "f", "e", "s"


@dataclass(eq=False)
class ModeGrid:
    n_sites: int
    spacing: float
    periodic: bool = True
    medium_mask: np.ndarray | None = None
    dispersion: str = "spectral"

    def __post_init__(self):
        if self.n_sites < 8:
            raise SetupError("lattice needs at least 8 sites")
        if self.spacing <= 0:
            raise SetupError("spacing must be positive")
        if self.medium_mask is None:
            self.medium_mask = np.ones(self.n_sites)
        self.medium_mask = np.asarray(self.medium_mask, dtype=float)
        if self.medium_mask.shape != (self.n_sites,):
            raise SetupError("mask length differs from the number of sites")
        if np.any(self.medium_mask < 0) or np.any(self.medium_mask > 1):
            raise SetupError("mask values must lie in [0, 1]")
        if self.dispersion not in ("spectral", "upwind"):
            raise SetupError(f"unknown dispersion {self.dispersion!r}")
        if self.dispersion == "spectral" and not self.periodic:
            raise SetupError("spectral dispersion needs a periodic lattice")

    @classmethod
    def from_grid(cls, grid: Grid1D, dispersion="spectral"):
        return cls(grid.n_points, grid.dz, True, grid.mask(), dispersion)

    @property
    def z(self):
        return self.spacing * np.arange(self.n_sites)

    @property
    def uniform(self) -> bool:
        return bool(np.all(self.medium_mask == 1.0))

    def free_hopping(self, c: float) -> np.ndarray:
        """Single-photon matrix h with i d/dt f = h f reproducing -c d/dz f."""
        n = self.n_sites
        if self.dispersion == "spectral":
            k = 2.0 * np.pi * np.fft.fftfreq(n, self.spacing)
            F = np.fft.fft(np.eye(n), axis=0) / np.sqrt(n)
            return F.conj().T @ np.diag(c * k) @ F
        h = np.zeros((n, n), dtype=complex)
        a = 1j * c / self.spacing
        for j in range(n):
            h[j, j] = -a
            if j > 0 or self.periodic:
                h[j, (j - 1) % n] = a
        return h


class SectorBasis:
    """Fixed-excitation basis; each quantum is a photon, an e or an s(+cavity)."""

    def __init__(self, sector: int, n_sites: int):
        if sector not in (1, 2):
            raise SetupError("only the one- and two-excitation sectors are supported")
        self.sector = sector
        self.n_sites = n = n_sites
        self.cavity = 3 * n
        dim = analytic_dimension(sector, n)
        if dim > MAX_DIMENSION:
            raise CapacityError(f"sector dimension {dim} exceeds {MAX_DIMENSION}")
        states = []
        for labels in combinations_with_replacement(range(3 * n), sector):
            cav = sum(1 for x in labels if x >= 2 * n)
            states.append(labels + (self.cavity,) * cav)
        self.fock = FockBasis(states)
        self.labels = list(combinations_with_replacement(range(3 * n), sector))

    def __len__(self):
        return len(self.fock)

    @property
    def dimension(self):
        return len(self.fock)

    def kind(self, label):
        n = self.n_sites
        return (PHOTON, EXCITED, SPIN)[label // n], label % n

    def photon(self, j):
        return j

    def excited(self, j):
        return self.n_sites + j

    def spin(self, j):
        return 2 * self.n_sites + j


def analytic_dimension(sector: int, n: int) -> int:
    if sector == 1:
        return 3 * n
    tri = n * (n + 1) // 2
    return 3 * tri + 3 * n * n


def hamiltonian_terms(grid: ModeGrid, p, basis: SectorBasis, include_decay=True):
    n = grid.n_sites
    terms = []
    h = grid.free_hopping(p.c)
    for j in range(n):
        for l in range(n):
            if abs(h[j, l]) > 1e-14 * max(1.0, abs(h).max()):
                terms.append(Term(h[j, l], (basis.photon(j),), (basis.photon(l),)))
    g = p.gn_sqrt * grid.medium_mask
    for j in range(n):
        if g[j] != 0:
            terms += hermitian_pair(-g[j], (basis.photon(j),), (basis.excited(j),))
        terms += hermitian_pair(-p.G, (basis.cavity, basis.spin(j)), (basis.excited(j),))
    if include_decay:
        if p.gamma:
            terms += [Term(-1j * p.gamma, (basis.excited(j),), (basis.excited(j),)) for j in range(n)]
        if p.kappa:
            terms.append(Term(-0.5j * p.kappa, (basis.cavity,), (basis.cavity,)))
    return terms


def build_hamiltonian(grid: ModeGrid, p, sector: int) -> sparse.csr_matrix:
    """Sparse Hamiltonian of the given excitation sector."""
    dim = analytic_dimension(sector, grid.n_sites)
    if dim > MAX_DIMENSION:
        raise CapacityError(f"sector dimension {dim} exceeds {MAX_DIMENSION}")
    basis = SectorBasis(sector, grid.n_sites)
    H = basis.fock.operator(hamiltonian_terms(grid, p, basis))
    H.eliminate_zeros()
    return H


@dataclass
class LatticeState:
    amplitudes: np.ndarray
    basis: SectorBasis
    time: float = 0.0

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


@dataclass
class LatticeTrajectory:
    times: np.ndarray
    amplitudes: np.ndarray
    basis: SectorBasis
    grid: ModeGrid
    norms: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.norms is None:
            self.norms = np.linalg.norm(self.amplitudes, axis=1)

    def state(self, i) -> LatticeState:
        return LatticeState(self.amplitudes[i], self.basis, float(self.times[i]))

    def fields(self, i) -> dict:
        return state_to_fields(self.state(i), self.grid.spacing)

    def photon_density(self, i) -> np.ndarray:
        """One-photon marginal density per unit length at sample i."""
        return photon_density(self.state(i), self.grid.spacing)


def evolve(state: LatticeState, H, dt: float, n_steps: int, stride: int = 1,
           lossless: bool | None = None, grid: ModeGrid | None = None) -> LatticeTrajectory:
    """Exact evolution psi(t) = exp(-i H t) psi(0), sampled every ``stride`` steps."""
    if n_steps < 1 or stride < 1:
        raise SetupError("need at least one step")
    H = sparse.csr_matrix(H)
    if lossless is None:
        lossless = abs(H - H.getH()).max() < 1e-12 if H.nnz else True
    psi = np.asarray(state.amplitudes, dtype=complex)
    n0 = np.linalg.norm(psi)
    dim = H.shape[0]
    samples = [psi]
    if dim <= DENSE_LIMIT:
        U = expm(-1j * dt * stride * H.toarray())
        for _ in range(n_steps // stride):
            psi = U @ psi
            samples.append(psi)
    else:
        n_samples = n_steps // stride + 1
        out = expm_multiply(-1j * H, psi, start=0.0, stop=dt * stride * (n_samples - 1),
                            num=n_samples, endpoint=True)
        samples = list(out)
    amps = np.array(samples)
    times = state.time + dt * stride * np.arange(len(amps))
    norms = np.linalg.norm(amps, axis=1)
    if not np.all(np.isfinite(norms)):
        raise NumericalError("non-finite amplitudes in lattice evolution")
    if lossless and np.max(np.abs(norms - n0)) > 1e-6:
        raise NumericalError(f"norm drift {np.max(np.abs(norms - n0)):.3g} in a lossless run")
    return LatticeTrajectory(times, amps, state.basis, grid, norms)


# ---------------------------------------------------------------------------
# field <-> lattice maps

def _pair_kinds(basis: SectorBasis):
    out = []
    for labels in basis.labels:
        (k1, i1), (k2, i2) = basis.kind(labels[0]), basis.kind(labels[1])
        key = k1 + k2
        # field name and (row, col) index following the ansatz conventions
        if key == "ff":
            out.append(("ff", i1, i2))
        elif key == "fe":
            out.append(("ef", i2, i1))
        elif key == "fs":
            out.append(("sf", i2, i1))
        elif key == "ee":
            out.append(("ee", i1, i2))
        elif key == "es":
            out.append(("es", i1, i2))
        elif key == "ss":
            out.append(("ss", i1, i2))
        else:  # pragma: no cover - labels are sorted
            raise AssertionError(key)
    return out


SYMMETRIC_FIELDS = ("ff", "ee", "ss")
PAIR_FIELDS = ("ff", "ef", "ee", "sf", "es", "ss")


def _pair_factor(name, i, j):
    return np.sqrt(2.0) if (name in SYMMETRIC_FIELDS and i != j) else 1.0


def state_to_fields(state: LatticeState, dz: float) -> dict:
    """Continuum ansatz amplitudes from lattice amplitudes.

    Sector 1: f, e, s with amplitude = field * sqrt(dz).  Sector 2: the six
    pair fields; symmetric fields carry sqrt(2) off the diagonal.
    """
    basis = state.basis
    n = basis.n_sites
    a = state.amplitudes
    if basis.sector == 1:
        out = {name: np.zeros(n, dtype=complex) for name in "fes"}
        for idx, (label,) in enumerate(basis.labels):
            kind, j = basis.kind(label)
            out[kind][j] = a[idx] / np.sqrt(dz)
        return out
    out = {name: np.zeros((n, n), dtype=complex) for name in PAIR_FIELDS}
    for idx, (name, i, j) in enumerate(_pair_kinds(basis)):
        val = a[idx] / (_pair_factor(name, i, j) * dz)
        out[name][i, j] = val
        if name in SYMMETRIC_FIELDS:
            out[name][j, i] = val
    return out


def fields_to_state(fields: dict, basis: SectorBasis, dz: float, time=0.0) -> LatticeState:
    """Inverse of :func:`state_to_fields` (symmetric fields must be symmetric)."""
    a = np.zeros(len(basis), dtype=complex)
    if basis.sector == 1:
        for idx, (label,) in enumerate(basis.labels):
            kind, j = basis.kind(label)
            a[idx] = fields[kind][j] * np.sqrt(dz)
    else:
        for idx, (name, i, j) in enumerate(_pair_kinds(basis)):
            a[idx] = fields[name][i, j] * _pair_factor(name, i, j) * dz
    return LatticeState(a, basis, time)


def photon_density(state: LatticeState, dz: float) -> np.ndarray:
    """<b_j^+ b_j> / dz for a state of a single sector."""
    basis = state.basis
    n = basis.n_sites
    prob = np.abs(state.amplitudes) ** 2
    dens = np.zeros(n)
    for idx, labels in enumerate(basis.labels):
        for lab in labels:
            if lab < n:
                dens[lab] += prob[idx]
    return dens / dz


def number_operator(basis: SectorBasis, site: int) -> np.ndarray:
    return basis.fock.occupation(basis.photon(site))


# ---------------------------------------------------------------------------
# observables on trajectories

@dataclass(frozen=True)
class VelocityFit:
    speed: float
    residual: float
    intercept: float


def _circular_centroid(z, dens, length):
    phase = np.exp(2j * np.pi * z / length)
    return np.angle((dens * phase).sum()) * length / (2 * np.pi)


def measure_centroid_velocity(traj: LatticeTrajectory, grid: ModeGrid | None = None,
                              component: str = "photon") -> VelocityFit:
    """Least-squares slope of the photon-probability centroid against time."""
    if component != "photon":
        raise SetupError("only the photon component is supported")
    grid = grid or traj.grid
    if grid is None:
        raise SetupError("trajectory carries no grid")
    if len(traj.times) < 10:
        raise WindowError("need at least 10 samples for a centroid fit")
    z = grid.z
    length = grid.n_sites * grid.spacing
    cents = []
    for i in range(len(traj.times)):
        dens = photon_density(traj.state(i), grid.spacing)
        if grid.periodic:
            cents.append(_circular_centroid(z, dens, length))
        else:
            cents.append((z * dens).sum() / dens.sum())
    cents = np.array(cents)
    if grid.periodic:
        cents = np.unwrap(cents * 2 * np.pi / length) * length / (2 * np.pi)
    if not grid.uniform:
        inside = grid.medium_mask[np.clip(np.round(np.mod(cents, length) / grid.spacing).astype(int),
                                          0, grid.n_sites - 1)] > 0.5
        if not np.all(inside):
            raise WindowError("centroid leaves the medium during the fit window")
    t = np.asarray(traj.times)
    slope, intercept = np.polyfit(t, cents, 1)
    resid = float(np.sqrt(np.mean((cents - (slope * t + intercept)) ** 2)))
    return VelocityFit(float(slope), resid, float(intercept))


# ---------------------------------------------------------------------------
# momentum-space view of the single-excitation sector

def momentum_blocks(H, basis: SectorBasis, grid: ModeGrid):
    """Return wavenumbers, 3x3 blocks (photon, e, s) and the largest off-block element."""
    if basis.sector != 1:
        raise SetupError("momentum blocks are defined for sector 1")
    n = basis.n_sites
    k = 2.0 * np.pi * np.fft.fftfreq(n, grid.spacing)
    U = np.zeros((len(basis), 3 * n), dtype=complex)
    for idx, (label,) in enumerate(basis.labels):
        kind, j = basis.kind(label)
        comp = "fes".index(kind)
        U[idx, comp * n:(comp + 1) * n] = np.exp(1j * k * grid.z[j]) / np.sqrt(n)
    Hk = U.conj().T @ np.asarray(sparse.csr_matrix(H).toarray()) @ U
    blocks = []
    off = Hk.copy()
    for m in range(n):
        sl = [m, n + m, 2 * n + m]
        blocks.append(Hk[np.ix_(sl, sl)])
        off[np.ix_(sl, sl)] = 0.0
    return k, blocks, float(np.abs(off).max())


@dataclass(frozen=True)
class DarkCheck:
    ok: bool
    eigen_residual: float
    vector_error: float
    null_vector: np.ndarray
    first_order_energy: float


def dark_eigenstate_check(H_k, photon_energy=0.0, p=None) -> DarkCheck:
    """Null vector of the interaction part of one momentum block.

    ``photon_energy`` (c k) is removed from the photon diagonal before the
    eigen-decomposition; the first-order energy of the dark vector under the
    full block is returned so callers can compare it with v1 * c * k.
    """
    H_k = np.asarray(H_k, dtype=complex)
    H_int = H_k.copy()
    H_int[0, 0] -= photon_energy
    vals, vecs = np.linalg.eig(H_int)
    i = int(np.argmin(np.abs(vals)))
    scale = np.linalg.norm(H_int, 2)
    resid = float(abs(vals[i]) / scale) if scale else 0.0
    v = vecs[:, i]
    v = v / np.linalg.norm(v)
    err = 0.0
    if p is not None:
        expected = np.array([p.G, 0.0, -p.gn_sqrt]) / np.hypot(p.G, p.gn_sqrt)
        phase = np.vdot(v, expected)
        v = v * (phase / abs(phase)) if abs(phase) > 0 else v
        err = float(np.linalg.norm(v - expected))
    energy = float(np.real(np.vdot(v, H_k @ v)))
    ok = resid <= 1e-10 and err <= 1e-8
    return DarkCheck(ok, resid, err, v, energy)
