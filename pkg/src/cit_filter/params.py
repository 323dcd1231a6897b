"""Physical parameters, derived quantities and the operating-condition checks.

All solvers work in natural units (``c = L = 1``).  Physical parameter sets
carry angular frequencies in rad/s, lengths in metres and ``c`` in m/s; use
:func:`nondimensionalize` at the I/O boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .darkstate import group_velocity_exact
from .errors import DomainError

SPEED_OF_LIGHT = 299_792_458.0
TWO_PI_MHZ = 2.0 * math.pi * 1e6

NATURAL = "natural"
PHYSICAL = "physical"

# Excited-state decay used whenever a preset does not fix gamma.  With
# G = 2 pi 3 MHz and kappa = 2 pi 0.1 MHz it gives C = G^2/(gamma kappa) = 15.
DEFAULT_GAMMA_MHZ = 6.0


@dataclass(frozen=True)
class SystemParams:
    """Couplings and geometry of the cavity/ensemble system.

    ``G`` is the single-atom cavity coupling, ``gn_sqrt`` the collective probe
    coupling g*sqrt(n), ``gamma`` the amplitude decay of the excited state and
    ``kappa`` the cavity (energy) decay rate.
    """

    G: float
    gn_sqrt: float
    gamma: float = 0.0
    kappa: float = 0.0
    c: float = 1.0
    L: float = 1.0
    unit_system: str = NATURAL

    def __post_init__(self):
        if self.unit_system not in (NATURAL, PHYSICAL):
            raise DomainError(f"unknown unit system {self.unit_system!r}")
        if not self.G > 0:
            raise DomainError(f"G must be positive, got {self.G}")
        if self.gn_sqrt < 0 or self.gamma < 0 or self.kappa < 0:
            raise DomainError("rates must be non-negative")
        if not (self.c > 0 and self.L > 0):
            raise DomainError("c and L must be positive")

    @property
    def ratio(self) -> float:
        """G / (g sqrt(n)); infinite for an empty medium."""
        return self.G / self.gn_sqrt if self.gn_sqrt > 0 else math.inf

    @classmethod
    def from_optical_depth(cls, G, od, gamma, kappa=0.0, c=1.0, L=1.0, unit_system=NATURAL):
        """Build params with g*sqrt(n) fixed by OD = L g^2 n / (gamma c)."""
        if od <= 0 or gamma <= 0:
            raise DomainError("optical depth and gamma must be positive")
        gn_sqrt = math.sqrt(od * gamma * c / L)
        return cls(G=G, gn_sqrt=gn_sqrt, gamma=gamma, kappa=kappa, c=c, L=L,
                   unit_system=unit_system)

    def as_dict(self) -> dict:
        return {
            "G": self.G, "gn_sqrt": self.gn_sqrt, "gamma": self.gamma,
            "kappa": self.kappa, "c": self.c, "L": self.L,
            "unit_system": self.unit_system,
        }


@dataclass(frozen=True)
class PulseSpec:
    """Gaussian input pulse.

    ``t_p`` is the 1/e half-width of the amplitude envelope in time, so the
    envelope is ``exp(-((z - center) / (c t_p))**2)``.
    """

    t_p: float
    center: float = 0.0
    mean_photons: float = 0.0
    shape: str = "gaussian"

    def __post_init__(self):
        if self.shape != "gaussian":
            raise DomainError(f"unsupported pulse shape {self.shape!r}")
        if not self.t_p > 0:
            raise DomainError("pulse duration must be positive")
        if self.mean_photons < 0:
            raise DomainError("mean photon number must be non-negative")


@dataclass(frozen=True)
class DerivedQuantities:
    od: float
    l_abs: float
    omega_tr: float
    v1: float
    v2: float
    delta_tau_12: float
    delta_tau_12_approx: float
    cooperativity: float
    ratio: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ConditionReport:
    strong_coupling: bool
    adiabatic: bool
    separability_ratio: float
    separability_bound: float
    separable: bool
    cavity_ok: bool
    cooperativity: float
    od: float
    adiabaticity: float
    cavity_margin: float
    messages: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def derive_quantities(p: SystemParams) -> DerivedQuantities:
    """Optical depth, transparency width, group velocities and delays.

    Velocities are fractions of ``c``; ``delta_tau_12`` uses the exact one-
    and two-excitation velocities, ``delta_tau_12_approx`` the weak-coupling
    form gamma*OD/(2 G^2).
    """
    if p.gamma <= 0:
        raise DomainError("optical depth and transparency width need gamma > 0")
    g2n = p.gn_sqrt ** 2
    if g2n <= 0:
        raise DomainError("optical depth is zero for an empty medium")
    l_abs = p.gamma * p.c / g2n
    od = p.L / l_abs
    omega_tr = p.G ** 2 / (p.gamma * math.sqrt(od))
    r = p.ratio
    v1 = group_velocity_exact(1, r)
    v2 = group_velocity_exact(2, r)
    delta_tau = p.L / p.c * (1.0 / v1 - 1.0 / v2)
    approx = p.gamma * od / (2.0 * p.G ** 2)
    coop = p.G ** 2 / (p.gamma * p.kappa) if p.kappa > 0 else math.inf
    return DerivedQuantities(
        od=od, l_abs=l_abs, omega_tr=omega_tr, v1=v1, v2=v2,
        delta_tau_12=delta_tau, delta_tau_12_approx=approx,
        cooperativity=coop, ratio=r,
    )


def check_conditions(p: SystemParams, pulse: PulseSpec) -> ConditionReport:
    """Evaluate strong coupling, adiabaticity, separability and cavity lifetime."""
    d = derive_quantities(p)
    adiabaticity = pulse.t_p * d.omega_tr
    ratio = d.delta_tau_12 / pulse.t_p
    bound = 0.5 * math.sqrt(d.od)
    transit = p.L / (d.v1 * p.c)
    cavity_margin = p.kappa * transit
    report = ConditionReport(
        strong_coupling=d.cooperativity > 1.0,
        adiabatic=adiabaticity > 1.0,
        separability_ratio=ratio,
        separability_bound=bound,
        separable=ratio > 1.0,
        cavity_ok=d.cooperativity > d.od,
        cooperativity=d.cooperativity,
        od=d.od,
        adiabaticity=adiabaticity,
        cavity_margin=cavity_margin,
    )
    verdict = {True: "ok", False: "FAILED"}
    m = report.messages
    m.append(f"strong coupling C > 1: C = {_fmt(d.cooperativity)} [{verdict[report.strong_coupling]}]")
    m.append(f"adiabaticity T_p*omega_tr > 1: {adiabaticity:.4g} [{verdict[report.adiabatic]}]")
    m.append(f"separation delay/T_p = {ratio:.4g} (needs > 1, bounded by sqrt(OD)/2 = {bound:.4g})"
             f" [{verdict[report.separable]}]")
    m.append(f"cavity lifetime C > OD: C = {_fmt(d.cooperativity)}, OD = {d.od:.4g}, "
             f"kappa*L/v1 = {cavity_margin:.4g} [{verdict[report.cavity_ok]}]")
    return report


def _fmt(x):
    return "inf" if math.isinf(x) else f"{x:.4g}"


def nondimensionalize(p: SystemParams) -> SystemParams:
    """Rescale to c = L = 1; rates are multiplied by L/c."""
    scale = p.L / p.c
    return SystemParams(G=p.G * scale, gn_sqrt=p.gn_sqrt * scale, gamma=p.gamma * scale,
                        kappa=p.kappa * scale, c=1.0, L=1.0, unit_system=NATURAL)


def dimensionalize(p: SystemParams, c: float, L: float) -> SystemParams:
    """Inverse of :func:`nondimensionalize` for the given c and L."""
    if p.c != 1.0 or p.L != 1.0:
        raise DomainError("dimensionalize expects natural-unit params")
    scale = c / L
    return SystemParams(G=p.G * scale, gn_sqrt=p.gn_sqrt * scale, gamma=p.gamma * scale,
                        kappa=p.kappa * scale, c=c, L=L, unit_system=PHYSICAL)


def with_reduced_light_speed(p: SystemParams, ratio_sq: float) -> SystemParams:
    """Natural-unit params with c lowered until (G / g sqrt(n))^2 == ratio_sq.

    OD, G, gamma and kappa are held fixed in physical time units, so only the
    free-space transit time L/c changes.  Slow-light observables depend on c
    only through G^2/(g^2 n), which this sets explicitly.
    """
    if not 0 < ratio_sq:
        raise DomainError("target ratio must be positive")
    od = p.L * p.gn_sqrt ** 2 / (p.gamma * p.c)
    c_sim = p.G ** 2 * p.L / (od * p.gamma * ratio_sq)
    reduced = replace(p, c=c_sim, gn_sqrt=math.sqrt(od * p.gamma * c_sim / p.L))
    return nondimensionalize(reduced)


def physical_from_mhz(G_MHz, gamma_MHz, od=None, gn_MHz=None, kappa_MHz=0.0,
                      L=1e-4, c=SPEED_OF_LIGHT) -> SystemParams:
    """Physical params from rates quoted as f = omega / 2 pi in MHz."""
    G = G_MHz * TWO_PI_MHZ
    gamma = gamma_MHz * TWO_PI_MHZ
    kappa = kappa_MHz * TWO_PI_MHZ
    if gn_MHz is not None and od is not None:
        raise DomainError("give either OD or gn_MHz, not both")
    if od is not None:
        return SystemParams.from_optical_depth(G, od, gamma, kappa, c=c, L=L, unit_system=PHYSICAL)
    if gn_MHz is None:
        raise DomainError("one of OD or gn_MHz is required")
    return SystemParams(G=G, gn_sqrt=gn_MHz * TWO_PI_MHZ, gamma=gamma, kappa=kappa, c=c, L=L,
                        unit_system=PHYSICAL)
