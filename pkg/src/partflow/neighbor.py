"""Cell linked-list spatial index over the particle store.

Cells are h wide in x (origin -h, covering the extended band
[-h, Lx + h]) and Ly/ncy wide in y, where ncy = round(Ly/h) when that
divides Ly exactly and floor(Ly/h) otherwise, so a cell is never
narrower than h and the periodic column topology tiles [0, Ly) evenly.
A query touches the 3x3 block of cells around the query point (deduped,
wrapping in y), which is a superset of every particle within
minimum-image distance h.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import DomainSpec
from .particles import ParticleStore

__all__ = ["CellGrid", "build_cell_list", "neighbors", "min_image_dy"]


def min_image_dy(dy: np.ndarray, Ly: float) -> np.ndarray:
    """Periodic transverse distance |dy| under the minimum-image convention."""
    d = np.abs(dy)
    return np.minimum(d, Ly - d)


@dataclass
class CellGrid:
    h: float
    Lx: float
    Ly: float
    ncx: int
    ncy: int
    x0: float
    # CSR layout: particle indices sorted by cell, with bucket offsets
    order: np.ndarray
    starts: np.ndarray

    @property
    def dyc(self) -> float:
        return self.Ly / self.ncy

    def cell_of(self, x, y):
        """Cell (cx, cy) containing each point; x clamped, y wrapped."""
        cx = np.floor((np.asarray(x, dtype=float) - self.x0) / self.h).astype(int)
        cx = np.clip(cx, 0, self.ncx - 1)
        cy = np.floor(np.mod(np.asarray(y, dtype=float), self.Ly) / self.dyc).astype(int)
        cy = np.clip(cy, 0, self.ncy - 1)  # guards y == Ly after float mod
        return cx, cy

    def bucket(self, cx: int, cy: int) -> np.ndarray:
        c = cx * self.ncy + cy
        return self.order[self.starts[c] : self.starts[c + 1]]

    def neighbor_cells(self, cx: int, cy: int):
        """Deduped 3x3 block of cells around (cx, cy), wrapping in y only."""
        cells = set()
        for di in (-1, 0, 1):
            nx_ = cx + di
            if nx_ < 0 or nx_ >= self.ncx:
                continue
            for dj in (-1, 0, 1):
                cells.add((nx_, (cy + dj) % self.ncy))
        return sorted(cells)


def build_cell_list(store: ParticleStore, h: float, domain: DomainSpec) -> CellGrid:
    """Single-pass bucket construction; rejects particles off the band."""
    if h <= 0:
        raise ValueError("cell size must be positive")
    x0 = -h
    ncx = int(np.ceil((domain.Lx + 2.0 * h) / h))
    ratio = domain.Ly / h
    ncy = int(round(ratio)) if abs(ratio - round(ratio)) < 1e-9 else int(np.floor(ratio))
    ncy = max(ncy, 1)

    out = (store.x < -h) | (store.x > domain.Lx + h)
    if np.any(out):
        bad = np.flatnonzero(out)[0]
        raise ValueError(
            f"particle (k={store.k[bad]}, j={store.j[bad]}) at x={store.x[bad]:.6g} "
            f"is outside the band [-h, Lx+h]"
        )

    grid = CellGrid(h=h, Lx=domain.Lx, Ly=domain.Ly, ncx=ncx, ncy=ncy, x0=x0,
                    order=np.zeros(0, dtype=int), starts=np.zeros(1, dtype=int))
    cx, cy = grid.cell_of(store.x, store.y)
    cell_ids = cx * ncy + cy
    # stable sort keeps the (k, j)-ascending order inside each bucket
    order = np.argsort(cell_ids, kind="stable")
    counts = np.bincount(cell_ids, minlength=ncx * ncy)
    grid.order = order
    grid.starts = np.concatenate([[0], np.cumsum(counts)])
    return grid


def neighbors(grid: CellGrid, p) -> np.ndarray:
    """Indices of all particles in the 3x3 cell block around point p.

    Ascending index order (hence ascending (k, j) for stores built by
    trace_all). A superset of the particles within minimum-image
    distance h of p.
    """
    p = np.asarray(p, dtype=float)
    cx, cy = grid.cell_of(p[0], p[1])
    parts = [grid.bucket(icx, icy) for icx, icy in grid.neighbor_cells(int(cx), int(cy))]
    if not parts:
        return np.zeros(0, dtype=int)
    out = np.concatenate(parts)
    out.sort()
    return out
