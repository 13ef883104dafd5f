"""Uniform rectangular grid over the square tissue domain.

Fields are stored as float64 arrays of shape (M2, M1): axis 0 runs along
y (rows), axis 1 along x (columns), so ``field[:, 0]`` is the x=0 face.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class Grid2D:
    M1: int      # node count along x
    M2: int      # node count along y
    dx: float    # x spacing, mm
    dy: float    # y spacing, mm
    L: float     # side length, mm

    def __post_init__(self):
        if self.M1 < 3 or self.M2 < 3:
            raise DomainError(f"grid needs at least 3 nodes per axis, got {self.M1}x{self.M2}")
        for count, spacing, axis in ((self.M1, self.dx, "x"), (self.M2, self.dy, "y")):
            if not spacing > 0:
                raise DomainError(f"d{axis} must be positive, got {spacing!r}")
            if abs((count - 1) * spacing - self.L) > 1e-12 * self.L:
                raise DomainError(
                    f"(M-1)*d{axis} = {(count - 1) * spacing!r} does not span L = {self.L!r}"
                )

    @classmethod
    def from_counts(cls, M1: int, M2: int, L: float) -> "Grid2D":
        if not L > 0:
            raise DomainError(f"L must be positive, got {L!r}")
        if M1 < 3 or M2 < 3:
            raise DomainError(f"grid needs at least 3 nodes per axis, got {M1}x{M2}")
        return cls(M1=M1, M2=M2, dx=L / (M1 - 1), dy=L / (M2 - 1), L=L)

    def zeros(self) -> np.ndarray:
        return np.zeros((self.M2, self.M1), dtype=np.float64)

    def full(self, value: float) -> np.ndarray:
        return np.full((self.M2, self.M1), value, dtype=np.float64)

    def x_coords(self) -> np.ndarray:
        return np.arange(self.M1) * self.dx

    def node_index(self, x: float, y: float) -> tuple[int, int]:
        """(j, i) of the node nearest to the point (x, y) in mm."""
        if not (0.0 <= x <= self.L and 0.0 <= y <= self.L):
            raise DomainError(f"point ({x!r}, {y!r}) lies outside [0, {self.L}]^2")
        i = min(self.M1 - 1, max(0, round(x / self.dx)))
        j = min(self.M2 - 1, max(0, round(y / self.dy)))
        return j, i

    @property
    def mid_row(self) -> int:
        """Row index of the y = L/2 line."""
        return self.M2 // 2

    def quadrature_weights(self) -> np.ndarray:
        """Trapezoidal weights (M2, M1): the discrete integral these define
        is the quantity conserved by the reflected-ghost schemes."""
        wx = np.ones(self.M1)
        wx[0] = wx[-1] = 0.5
        wy = np.ones(self.M2)
        wy[0] = wy[-1] = 0.5
        return np.outer(wy, wx)

    def integrate(self, field: np.ndarray) -> float:
        """Trapezoidal integral of a nodal field over the domain, in
        field-units times mm^2."""
        return float(np.sum(self.quadrature_weights() * field) * self.dx * self.dy)
