"""Advection operators and the classical RK4 step shared by both solvers."""

from __future__ import annotations

import os

import numpy as np
from scipy import fft

# RK4 stability interval on the imaginary axis is |lambda dt| < 2*sqrt(2).
RK4_LIMIT = 2.8
SCHEMES = ("spectral", "upwind")


def default_workers():
    env = os.environ.get("CIT_FILTER_THREADS")
    return int(env) if env else 1


class Advection:
    """-c d/dz along selected axes of an n-dimensional array.

    ``spectral`` multiplies by i k in Fourier space (periodic domain);
    ``upwind`` uses the first-order backward difference, since all fields
    move to the right.
    """

    def __init__(self, n, dz, c, scheme="spectral", workers=None):
        if scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {scheme!r}")
        self.scheme = scheme
        self.c = c
        self.dz = dz
        self.workers = workers or default_workers()
        self.k = 2.0 * np.pi * np.fft.fftfreq(n, dz)

    @property
    def max_rate(self):
        if self.scheme == "spectral":
            return self.c * np.abs(self.k).max()
        return 2.0 * self.c / self.dz

    def apply(self, a, axes):
        """Return -c * sum_{ax in axes} d a / d z_ax."""
        if self.scheme == "upwind":
            out = np.zeros_like(a)
            for ax in axes:
                out -= (a - np.roll(a, 1, axis=ax)) * (self.c / self.dz)
            return out
        if a.ndim == 1:
            return fft.ifft(-1j * self.c * self.k * fft.fft(a, workers=self.workers),
                            workers=self.workers)
        if len(axes) == 2:
            kk = self.k[:, None] + self.k[None, :]
            return fft.ifft2(-1j * self.c * kk * fft.fft2(a, workers=self.workers),
                             workers=self.workers)
        (ax,) = axes
        shape = [1] * a.ndim
        shape[ax] = -1
        k = self.k.reshape(shape)
        return fft.ifft(-1j * self.c * k * fft.fft(a, axis=ax, workers=self.workers),
                        axis=ax, workers=self.workers)


def rk4_step(rhs, y, dt):
    """One classical Runge-Kutta step for a list of arrays."""
    k1 = rhs(y)
    k2 = rhs([a + 0.5 * dt * b for a, b in zip(y, k1)])
    k3 = rhs([a + 0.5 * dt * b for a, b in zip(y, k2)])
    k4 = rhs([a + dt * b for a, b in zip(y, k3)])
    return [a + (dt / 6.0) * (b1 + 2.0 * b2 + 2.0 * b3 + b4)
            for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]


def choose_steps(t_end, dt_default, dt=None):
    """Number of steps and step size (at most ``dt``) that land exactly on t_end."""
    if t_end <= 0:
        return 0, 0.0
    dt = dt_default if dt is None else dt
    n = int(np.ceil(t_end / dt - 1e-9))
    return n, t_end / n


def interaction_rate(G, gn_sqrt, n_excitations):
    """Spectral radius of the local coupling in the N-excitation sector."""
    from .darkstate import single_mode_basis, single_mode_terms

    basis = single_mode_basis(n_excitations)
    H = basis.operator(single_mode_terms(G, gn_sqrt)).toarray()
    return float(np.abs(np.linalg.eigvalsh(H)).max())
