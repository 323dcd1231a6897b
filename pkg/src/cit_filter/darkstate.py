"""Dark-state amplitudes and photon-number dependent group velocities.

The N-excitation dark state of the single-mode model is a superposition of
``|M photons, (N-M) spin excitations, (N-M) cavity photons>`` with weights

    c_M = (-1)^M  N!/(N-M)!  r^M / sqrt(M!),    r = G / (g sqrt(n)).

Coefficients are held as (log|c_M|, sign) so that N in the hundreds does not
overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import CapacityError, DomainError
from .fock import FockBasis, hermitian_pair

MAX_EXCITATIONS = 150
MAX_FOCK_EXCITATIONS = 8


@dataclass(frozen=True)
class DarkStateCoefficients:
    n_excitations: int
    ratio: float
    log_abs: np.ndarray
    signs: np.ndarray

    @property
    def log_norm(self) -> float:
        """log of the normalisation constant sqrt(sum c_M^2)."""
        top = self.log_abs.max()
        return float(top + 0.5 * np.log(np.exp(2 * (self.log_abs - top)).sum()))

    @property
    def coeffs(self) -> np.ndarray:
        """Raw coefficients; overflow to inf for very large N."""
        with np.errstate(over="ignore"):
            return self.signs * np.exp(self.log_abs)

    @property
    def norm(self) -> float:
        with np.errstate(over="ignore"):
            return float(np.exp(self.log_norm))

    @property
    def normalized(self) -> np.ndarray:
        return self.signs * np.exp(self.log_abs - self.log_norm)


def _check(N, r):
    if int(N) != N or N < 1:
        raise DomainError(f"excitation number must be a positive integer, got {N}")
    if N > MAX_EXCITATIONS:
        raise CapacityError(f"N = {N} exceeds the supported maximum {MAX_EXCITATIONS}")
    if not r > 0:
        raise DomainError(f"coupling ratio must be positive, got {r}")


def dark_coefficients(N: int, r: float) -> DarkStateCoefficients:
    _check(N, r)
    M = np.arange(N + 1)
    log_abs = gammaln(N + 1) - gammaln(N - M + 1) - 0.5 * gammaln(M + 1) + M * math.log(r)
    signs = np.where(M % 2 == 0, 1.0, -1.0)
    return DarkStateCoefficients(int(N), float(r), log_abs, signs)


def group_velocity_exact(N: int, r: float) -> float:
    """Group velocity (fraction of c) of the N-photon component.

    Each term is weighted by its photon fraction M/N.
    """
    if math.isinf(r):
        return 1.0
    d = dark_coefficients(N, r)
    w = np.exp(2.0 * (d.log_abs - d.log_abs.max()))
    M = np.arange(N + 1)
    return float((M * w).sum() / (N * w.sum()))


def group_velocity_approx(N: int, r: float) -> float:
    """Weak-coupling form r^2 N (valid for G << g sqrt(n))."""
    if N < 1:
        raise DomainError("N must be >= 1")
    return r * r * N


def group_velocity_two(r: float) -> float:
    """Closed form of the two-excitation velocity."""
    r2 = r * r
    return (2 * r2 * r2 + 2 * r2) / (1 + 4 * r2 + 2 * r2 * r2)


# single-mode model: probe b, collective excited E, collective spin S, cavity a
_B, _E, _S, _A = 0, 1, 2, 3


def single_mode_basis(N: int) -> FockBasis:
    """Fock states with n_b + n_E + n_S = N and n_a = n_S."""
    states = []
    for nb in range(N + 1):
        for ne in range(N + 1 - nb):
            ns = N - nb - ne
            states.append((_B,) * nb + (_E,) * ne + (_S,) * ns + (_A,) * ns)
    return FockBasis(states)


def single_mode_terms(G: float, gn_sqrt: float):
    """Interaction -(g sqrt(n) b^+ E + G a^+ S^+ E + h.c.) at zero detuning."""
    return (hermitian_pair(-gn_sqrt, (_B,), (_E,))
            + hermitian_pair(-G, (_A, _S), (_E,)))


def dark_state_vector(N: int, basis: FockBasis, r: float) -> np.ndarray:
    d = dark_coefficients(N, r)
    psi = np.zeros(len(basis), dtype=complex)
    for M, c in enumerate(d.normalized):
        state = (_B,) * M + (_S,) * (N - M) + (_A,) * (N - M)
        psi[basis.index[tuple(sorted(state))]] = c
    return psi


def dark_state_residual(N: int, p) -> float:
    """||H psi_D|| / ||H|| for the single-mode model in the N-excitation sector.

    ``p`` only needs ``G`` and ``gn_sqrt`` attributes.  The collective atomic
    modes are bosonic, so the matrix elements carry sqrt(occupation) factors.
    """
    if N > MAX_FOCK_EXCITATIONS:
        raise CapacityError(f"Fock check limited to N <= {MAX_FOCK_EXCITATIONS}")
    _check(N, p.G / p.gn_sqrt if p.gn_sqrt > 0 else 0.0)
    basis = single_mode_basis(N)
    H = basis.operator(single_mode_terms(p.G, p.gn_sqrt)).toarray()
    psi = dark_state_vector(N, basis, p.G / p.gn_sqrt)
    return float(np.linalg.norm(H @ psi) / np.linalg.norm(H, 2))
