"""Rectangular node-centred grids and the finite-difference toolbox.

A ``ScalarGrid`` stores nx*ny real values; node (i, j) sits at
(i*dx, j*dy) with dx = Lx/nx, dy = Ly/ny. The y direction is periodic
(node ny would coincide with node 0 shifted by Ly), x is not.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainSpec",
    "ScalarGrid",
    "grad_fd",
    "laplacian_fd",
    "interp_bilinear",
]


@dataclass(frozen=True)
class DomainSpec:
    """Computational rectangle [0, Lx] x [0, Ly], periodic in y."""

    Lx: float
    Ly: float
    periodic_y: bool = True

    def __post_init__(self):
        if not (self.Lx > 0 and self.Ly > 0):
            raise ValueError(f"domain extents must be positive, got {self.Lx}, {self.Ly}")

    def wrap_y(self, y):
        return np.mod(y, self.Ly)


@dataclass
class ScalarGrid:
    """Node-centred scalar field on a DomainSpec-shaped rectangle."""

    nx: int
    ny: int
    Lx: float
    Ly: float
    values: np.ndarray  # shape (nx, ny)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grids need at least 2 nodes per direction")
        if self.values.shape != (self.nx, self.ny):
            raise ValueError(
                f"values shape {self.values.shape} != ({self.nx}, {self.ny})"
            )
        if not np.all(np.isfinite(self.values)):
            raise ValueError("grid values must all be finite")

    @property
    def dx(self) -> float:
        return self.Lx / self.nx

    @property
    def dy(self) -> float:
        return self.Ly / self.ny

    @property
    def xs(self) -> np.ndarray:
        return np.arange(self.nx) * self.dx

    @property
    def ys(self) -> np.ndarray:
        return np.arange(self.ny) * self.dy

    def nodes(self) -> np.ndarray:
        """All node coordinates, shape (nx*ny, 2), x-major order."""
        xx, yy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def like(self, values: np.ndarray) -> "ScalarGrid":
        return ScalarGrid(self.nx, self.ny, self.Lx, self.Ly, values)

    @classmethod
    def constant(cls, nx, ny, Lx, Ly, value=0.0) -> "ScalarGrid":
        return cls(nx, ny, Lx, Ly, np.full((nx, ny), float(value)))

    @classmethod
    def from_function(cls, nx, ny, Lx, Ly, fn) -> "ScalarGrid":
        xx, yy = np.meshgrid(np.arange(nx) * Lx / nx, np.arange(ny) * Ly / ny, indexing="ij")
        return cls(nx, ny, Lx, Ly, fn(xx, yy))

    def to_csv(self, path) -> None:
        """Headerless CSV, one line per x index, ny comma-separated values."""
        np.savetxt(path, self.values, delimiter=",", fmt="%.17g")

    @classmethod
    def from_csv(cls, path, nx, ny, Lx, Ly) -> "ScalarGrid":
        raw = np.loadtxt(path, delimiter=",", dtype=float)
        flat = np.atleast_1d(raw).ravel()
        if flat.size != nx * ny:
            raise ValueError(f"CSV holds {flat.size} values, expected {nx}*{ny}")
        return cls(nx, ny, Lx, Ly, flat.reshape(nx, ny))


def grad_fd(grid: ScalarGrid) -> tuple[ScalarGrid, ScalarGrid]:
    """Finite-difference gradient (d/dx, d/dy) of a grid.

    Central second-order differences in the interior, one-sided
    second-order at the two x boundaries, periodic wrap in y. Exact for
    data linear in each coordinate.
    """
    if grid.nx < 3 or grid.ny < 3:
        raise ValueError("grad_fd needs at least 3 nodes per direction")
    v = grid.values
    dx, dy = grid.dx, grid.dy

    gx = np.empty_like(v)
    gx[1:-1] = (v[2:] - v[:-2]) / (2.0 * dx)
    # one-sided second order, written in difference form so constants
    # differentiate to exactly zero
    gx[0] = (4.0 * (v[1] - v[0]) - (v[2] - v[0])) / (2.0 * dx)
    gx[-1] = (4.0 * (v[-1] - v[-2]) - (v[-1] - v[-3])) / (2.0 * dx)

    gy = (np.roll(v, -1, axis=1) - np.roll(v, 1, axis=1)) / (2.0 * dy)
    return grid.like(gx), grid.like(gy)


def laplacian_fd(grid: ScalarGrid) -> ScalarGrid:
    """Five-point Laplacian, periodic in y, zero-flux (Neumann) in x.

    The x part is written in flux form with vanishing flux through the
    first and last node faces, so the discrete integral of the result
    over the grid is zero up to the periodic y-cancellation.
    """
    v = grid.values
    dx2, dy2 = grid.dx ** 2, grid.dy ** 2

    flux = np.zeros((grid.nx + 1, grid.ny))
    flux[1:-1] = v[1:] - v[:-1]
    lap_x = (flux[1:] - flux[:-1]) / dx2

    lap_y = (np.roll(v, -1, axis=1) - 2.0 * v + np.roll(v, 1, axis=1)) / dy2
    return grid.like(lap_x + lap_y)


def interp_bilinear(grid: ScalarGrid, points: np.ndarray) -> np.ndarray:
    """Bilinear interpolation at arbitrary points, vectorised.

    x is clamped to the node hull [0, (nx-1)dx] (constant extension in
    x), y wraps modulo Ly. Exact for data linear in each coordinate and
    monotone: the result lies within the min/max of the four stencil
    values.
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)

    x = np.clip(pts[:, 0], 0.0, (grid.nx - 1) * grid.dx)
    y = np.mod(pts[:, 1], grid.Ly)

    fx = x / grid.dx
    i0 = np.clip(np.floor(fx).astype(int), 0, grid.nx - 2)
    tx = np.clip(fx - i0, 0.0, 1.0)

    fy = y / grid.dy
    j0 = np.floor(fy).astype(int) % grid.ny
    ty = fy - np.floor(fy)
    j1 = (j0 + 1) % grid.ny

    v = grid.values
    v00 = v[i0, j0]
    v10 = v[i0 + 1, j0]
    v01 = v[i0, j1]
    v11 = v[i0 + 1, j1]
    out = (
        v00 * (1 - tx) * (1 - ty)
        + v10 * tx * (1 - ty)
        + v01 * (1 - tx) * ty
        + v11 * tx * ty
    )
    return out[0] if single else out
