import math

import numpy as np
import pytest

from partflow.grid import DomainSpec
from partflow.neighbor import build_cell_list, min_image_dy, neighbors
from partflow.particles import ParticleStore


def store_from_positions(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    return ParticleStore(
        k=np.arange(n), j=np.zeros(n, dtype=int), x=x, y=y,
        w=np.ones(n), rho=np.ones(n),
        xi=np.zeros(n), m0=np.zeros(n, dtype=int),
        m1=np.zeros(n, dtype=int), m2=np.zeros(n, dtype=int),
    )


DOM = DomainSpec(1.0, 0.25)


def test_empty_store():
    grid = build_cell_list(store_from_positions([], []), 0.025, DOM)
    assert grid.order.size == 0
    assert neighbors(grid, np.array([0.5, 0.1])).size == 0


def test_single_particle_bucket():
    # x0 = -h: floor((0.5 + 0.025)/0.025) = 21, floor(0.1/0.025) = 4
    grid = build_cell_list(store_from_positions([0.5], [0.1]), 0.025, DOM)
    cx, cy = grid.cell_of(0.5, 0.1)
    assert (int(cx), int(cy)) == (21, 4)
    assert grid.bucket(21, 4).tolist() == [0]


def test_bucket_sizes_conserve_particles():
    rng = np.random.default_rng(42)
    n = 100_000
    x = rng.uniform(-0.025, 1.025, n)
    y = rng.uniform(0, 0.25, n)
    grid = build_cell_list(store_from_positions(x, y), 0.025, DOM)
    assert grid.order.size == n
    counts = np.diff(grid.starts)
    assert counts.sum() == n
    # every index appears exactly once
    assert np.array_equal(np.sort(grid.order), np.arange(n))


def test_out_of_band_particle_rejected():
    with pytest.raises(ValueError, match="outside the band"):
        build_cell_list(store_from_positions([1.26], [0.1]), 0.025, DOM)


def test_near_particle_included_far_excluded():
    h = 0.025
    p = np.array([0.5, 0.125])
    near = p + np.array([0.99 * h, 0.0])
    far = p + np.array([2.01 * h, 0.0])
    grid = build_cell_list(store_from_positions([near[0], far[0]], [near[1], far[1]]), h, DOM)
    idx = neighbors(grid, p)
    assert 0 in idx
    assert 1 not in idx


def test_periodic_wrap_included():
    h = 0.025
    # query near y = 0, particle near y = Ly: minimum-image distance 0.02 < h
    grid = build_cell_list(store_from_positions([0.5], [DOM.Ly - 0.01]), h, DOM)
    idx = neighbors(grid, np.array([0.5, 0.01]))
    assert 0 in idx


@pytest.mark.parametrize("h", [0.025, 0.04, 1 / 30.0])
def test_completeness_random_configurations(h):
    # neighbours(p) must be a superset of the minimum-image ball of radius h
    rng = np.random.default_rng(17)
    trials = 250
    for _ in range(trials):
        n = rng.integers(1, 60)
        x = rng.uniform(-h, 1.0 + h, n)
        y = rng.uniform(0, DOM.Ly, n)
        grid = build_cell_list(store_from_positions(x, y), h, DOM)
        p = np.array([rng.uniform(-h, 1 + h), rng.uniform(0, DOM.Ly)])
        idx = set(neighbors(grid, p).tolist())
        d = np.hypot(p[0] - x, min_image_dy(p[1] - y, DOM.Ly))
        inside = set(np.flatnonzero(d < h).tolist())
        assert inside <= idx


def test_completeness_small_column_count():
    # Ly/h < 3: the deduped block degenerates to all columns and stays complete
    h = 0.1
    rng = np.random.default_rng(5)
    for _ in range(100):
        n = rng.integers(1, 40)
        x = rng.uniform(-h, 1 + h, n)
        y = rng.uniform(0, DOM.Ly, n)
        grid = build_cell_list(store_from_positions(x, y), h, DOM)
        assert grid.ncy >= 1
        p = np.array([rng.uniform(-h, 1 + h), rng.uniform(0, DOM.Ly)])
        idx = set(neighbors(grid, p).tolist())
        d = np.hypot(p[0] - x, min_image_dy(p[1] - y, DOM.Ly))
        inside = set(np.flatnonzero(d < h).tolist())
        assert inside <= idx


def test_no_double_counting():
    h = 0.1  # ncy = 2: the 3x3 block wraps onto itself and must be deduped
    grid = build_cell_list(store_from_positions([0.5, 0.51], [0.05, 0.2]), h, DOM)
    idx = neighbors(grid, np.array([0.5, 0.1]))
    assert idx.tolist() == sorted(set(idx.tolist()))


def test_cells_not_narrower_than_h():
    for h in (0.025, 0.03, 0.07, 0.1, 0.24):
        grid = build_cell_list(store_from_positions([0.1], [0.1]), h, DOM)
        assert grid.dyc >= h - 1e-12 or grid.ncy == 1
