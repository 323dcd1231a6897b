"""Uniform periodic grid along z with a smoothed medium profile."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SetupError


@dataclass(frozen=True)
class Grid1D:
    """Grid on [z_min, z_max) with ``n_points`` samples.

    The medium occupies [z_in, z_out] with tanh edges of width ``w_ramp``
    (default four cells).  The tanh half-points sit ``w_ramp/2`` outside the
    nominal edges, which makes int w^2 dz = z_out - z_in up to corrections of
    order exp(-2 L / w_ramp): the single-photon delay, proportional to
    int w^2, then does not depend on the ramp width.  ``z_in = z_out = None`` means a uniform medium
    filling the whole periodic domain.
    """

    z_min: float
    z_max: float
    n_points: int
    z_in: float | None = None
    z_out: float | None = None
    w_ramp: float | None = None

    def __post_init__(self):
        if self.n_points < 8:
            raise SetupError("grid needs at least 8 points")
        if not self.z_max > self.z_min:
            raise SetupError("empty domain")
        if (self.z_in is None) != (self.z_out is None):
            raise SetupError("give both medium edges or neither")
        if self.z_in is not None:
            if not (self.z_min < self.z_in < self.z_out < self.z_max):
                raise SetupError("medium must lie strictly inside the domain")

    @property
    def dz(self) -> float:
        return (self.z_max - self.z_min) / self.n_points

    @property
    def z(self) -> np.ndarray:
        return self.z_min + self.dz * np.arange(self.n_points)

    @property
    def uniform(self) -> bool:
        return self.z_in is None

    @property
    def ramp(self) -> float:
        return 4.0 * self.dz if self.w_ramp is None else self.w_ramp

    @property
    def length(self) -> float:
        """Medium length (the full domain for a uniform medium)."""
        if self.uniform:
            return self.z_max - self.z_min
        return self.z_out - self.z_in

    @property
    def detector(self) -> float:
        """Default detector plane just past the medium exit."""
        if self.uniform:
            raise SetupError("uniform medium has no exit plane")
        return self.z_out + 3.0 * self.ramp

    def mask(self) -> np.ndarray:
        """Coupling weight w(z) in [0, 1]."""
        if self.uniform:
            return np.ones(self.n_points)
        z, a = self.z, self.ramp
        w = 0.5 * (np.tanh((z - self.z_in + 0.5 * a) / a) - np.tanh((z - self.z_out - 0.5 * a) / a))
        w[w < 1e-14] = 0.0
        return w

    def index_of(self, z0: float) -> int:
        i = int(round((z0 - self.z_min) / self.dz))
        if not 0 <= i < self.n_points:
            raise SetupError(f"position {z0} outside the grid")
        return i

    def wavenumbers(self) -> np.ndarray:
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, self.dz)

    def as_dict(self) -> dict:
        return {"z_min": self.z_min, "z_max": self.z_max, "n_points": self.n_points,
                "z_in": self.z_in, "z_out": self.z_out, "w_ramp": self.ramp, "dz": self.dz}


def gaussian_envelope(grid: Grid1D, center: float, half_width: float) -> np.ndarray:
    """Normalised exp(-((z - center)/half_width)^2) on the grid."""
    f = np.exp(-(((grid.z - center) / half_width) ** 2)).astype(complex)
    norm = np.sqrt((np.abs(f) ** 2).sum() * grid.dz)
    if norm == 0:
        raise SetupError("pulse lies outside the grid")
    return f / norm
