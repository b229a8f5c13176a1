"""Particle seeding, explicit-Euler advancement and trajectory tracing.

Each inflow seed k carries a state (x, omega, rho) advanced in the
arclength-like parameter s by the explicit Euler recursion

    x^{j+1}     = x^j + ds * a(x^j)
    omega^{j+1} = omega^j * (1 + ds * div a(x^j))
    rho^{j+1}   = rho^j - ds * a0(x^j) * rho^j + ds * omega^j * S(x^j)

with omega^0 = ds * eps * a1(0, xi_k) and rho^0 = omega^0 * g(xi_k).
States are kept for x in the extended band [-h, Lx + h]; the indices
(m0, m1, m2) bracket the backward extension, the interior and the
forward extension. Outside [0, Lx] the velocity is the constant
extension and div a = a0 = S = 0, so backward states are exact
translates with frozen omega and rho.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .fields import DryInflowError, FieldSet
from .grid import DomainSpec

logger = logging.getLogger(__name__)

__all__ = [
    "SolverParams",
    "Particle",
    "Trajectory",
    "ParticleStore",
    "PositivityError",
    "TrajectoryError",
    "seed_particles",
    "euler_step",
    "trace_trajectory",
    "trace_all",
    "characteristic_oracle",
]


class TrajectoryError(RuntimeError):
    """A trajectory exhausted its step budget or went non-finite."""


class PositivityError(ValueError):
    """ds * |div a| >= 1 somewhere: discrete weights may change sign."""


@dataclass(frozen=True)
class SolverParams:
    """Numerical parameters of the particle solver.

    ``eps`` is the requested inflow spacing; the effective spacing
    Ly / round(Ly / eps) is used so the seeds tile the periodic
    transverse direction evenly.
    """

    h: float
    eps: float
    ds: float
    max_steps: int | None = None

    def __post_init__(self):
        if min(self.h, self.eps, self.ds) <= 0:
            raise ValueError("h, eps and ds must all be positive")

    def n_seeds(self, domain: DomainSpec) -> int:
        n = int(round(domain.Ly / self.eps))
        if n < 1:
            raise ValueError(f"eps = {self.eps} leaves no seed on Ly = {domain.Ly}")
        return n

    def eps_effective(self, domain: DomainSpec) -> float:
        return domain.Ly / self.n_seeds(domain)

    def step_budget(self, domain: DomainSpec, alpha: float) -> int:
        if self.max_steps is not None:
            return self.max_steps
        return 10 * math.ceil((domain.Lx + 2.0 * self.h) / (self.ds * alpha))


@dataclass
class Particle:
    """Single particle state: position, quadrature weight, mass rho = omega*u."""

    pos: np.ndarray
    weight: float
    mass: float

    def __post_init__(self):
        self.pos = np.asarray(self.pos, dtype=float)


@dataclass
class Trajectory:
    """All stored states of one seed, indexed j = m0 .. m2 (m0 <= 0 <= m1 <= m2)."""

    k: int
    xi: float
    js: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    rho: np.ndarray
    m0: int
    m1: int
    m2: int

    def state(self, j: int) -> Particle:
        idx = int(j - self.m0)
        return Particle(np.array([self.x[idx], self.y[idx]]), self.w[idx], self.rho[idx])


@dataclass
class ParticleStore:
    """Flat read-only store of all states of all trajectories.

    Rows are ordered by (k, j) ascending, which fixes the reconstruction
    summation order.
    """

    k: np.ndarray
    j: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    rho: np.ndarray
    xi: np.ndarray  # per-seed
    m0: np.ndarray
    m1: np.ndarray
    m2: np.ndarray
    skipped: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=int))

    def __len__(self) -> int:
        return self.x.size

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.y])

    def to_csv(self, path) -> None:
        arr = np.column_stack([self.k, self.j, self.x, self.y, self.w, self.rho])
        np.savetxt(
            path,
            arr,
            delimiter=",",
            header="k,j,x,y,omega,rho",
            comments="",
            fmt=["%d", "%d", "%.17g", "%.17g", "%.17g", "%.17g"],
        )

    @classmethod
    def from_trajectories(cls, trajectories: Sequence[Trajectory], skipped=()) -> "ParticleStore":
        if not trajectories:
            z = np.zeros(0)
            zi = np.zeros(0, dtype=int)
            return cls(zi, zi, z, z, z, z, z, zi, zi, zi, np.asarray(skipped, dtype=int))
        ks = np.concatenate([np.full(t.js.size, t.k, dtype=int) for t in trajectories])
        js = np.concatenate([t.js for t in trajectories])
        return cls(
            k=ks,
            j=js,
            x=np.concatenate([t.x for t in trajectories]),
            y=np.concatenate([t.y for t in trajectories]),
            w=np.concatenate([t.w for t in trajectories]),
            rho=np.concatenate([t.rho for t in trajectories]),
            xi=np.array([t.xi for t in trajectories]),
            m0=np.array([t.m0 for t in trajectories], dtype=int),
            m1=np.array([t.m1 for t in trajectories], dtype=int),
            m2=np.array([t.m2 for t in trajectories], dtype=int),
            skipped=np.asarray(skipped, dtype=int),
        )


def check_weight_positivity(fields: FieldSet, params: SolverParams, domain: DomainSpec) -> float:
    """Run-start checks on the step size.

    Samples ds*|div a| over the extended band and raises if it reaches 1
    (weights could change sign). Also warns when a single step crosses
    more than the kernel radius (ds * |a| > h): the extension bands then
    hold no particle and the stability relation behind the error
    estimate is void.
    """
    xs = np.linspace(-params.h, domain.Lx + params.h, 129)
    ys = np.linspace(0.0, domain.Ly, 65)
    xx, yy = np.meshgrid(xs, ys, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    div = fields.divergence(pts)
    worst = params.ds * float(np.abs(div).max())
    if worst >= 1.0:
        raise PositivityError(
            f"ds * |div a| reaches {worst:.3g} >= 1; weights may change sign"
        )
    step_len = params.ds * float(np.linalg.norm(fields.velocity(pts), axis=1).max())
    if step_len > params.h:
        logger.warning(
            "ds * max|a| = %.3g exceeds the kernel radius h = %.3g; "
            "reconstruction accuracy degrades", step_len, params.h,
        )
    return worst


def seed_particles(domain: DomainSpec, params: SolverParams, fields: FieldSet, *, skip_dry: bool = False):
    """Create the inflow seeds.

    Returns (seeds, skipped) where ``seeds`` is a list of
    (k, xi_k, Particle) and ``skipped`` lists seed indices with a1 <= 0
    (only when skip_dry, otherwise DryInflowError is raised).

    Seeds sit at midpoints xi_k = (k + 1/2) * eps_eff, k = 0..n-1, so no
    seed rides a symmetry line of the velocity field.
    """
    n = params.n_seeds(domain)
    eps = params.eps_effective(domain)
    xi = (np.arange(n) + 0.5) * eps
    pts = np.column_stack([np.zeros(n), xi])
    a1 = fields.velocity(pts)[:, 0]
    g = fields.boundary(xi)

    bad = np.flatnonzero(a1 <= 0.0)
    if bad.size and not skip_dry:
        raise DryInflowError(
            f"a1(0, xi) <= 0 at seed(s) {bad.tolist()}: inflow boundary is characteristic"
        )

    w0 = params.ds * eps * a1
    seeds = []
    for k in range(n):
        if a1[k] <= 0.0:
            continue
        seeds.append((k, float(xi[k]), Particle(np.array([0.0, xi[k]]), float(w0[k]), float(w0[k] * g[k]))))
    return seeds, bad


def euler_step(p: Particle, fields: FieldSet, ds: float, direction: str = "forward") -> Particle:
    """One explicit Euler step of the (x, omega, rho) system.

    ``backward`` undoes one step through the constant extension field:
    the position is translated by -ds*a(pos) (reverse Euler) and omega,
    rho are frozen, which solves the forward recursion exactly wherever
    div a = a0 = S = 0.
    """
    pt = p.pos[None, :]
    if direction == "forward":
        a = fields.velocity(pt)[0]
        div = float(fields.divergence(pt)[0])
        a0 = float(fields.reaction(pt)[0])
        s = float(fields.source(pt)[0])
        new_pos = p.pos + ds * a
        new_w = p.weight * (1.0 + ds * div)
        new_rho = p.mass - ds * a0 * p.mass + ds * p.weight * s
    elif direction == "backward":
        if fields.extension_velocity is not None:
            a = np.asarray(fields.extension_velocity, dtype=float)
        else:
            a = fields.velocity(pt)[0]
        new_pos = p.pos - ds * a
        new_w = p.weight
        new_rho = p.mass
    else:
        raise ValueError(f"unknown direction {direction!r}")
    if not np.all(np.isfinite(new_pos)) or not np.isfinite(new_w) or not np.isfinite(new_rho):
        raise TrajectoryError("non-finite state after Euler step")
    new_pos = np.array([new_pos[0], fields.domain.wrap_y(new_pos[1])])
    return Particle(new_pos, float(new_w), float(new_rho))


def trace_trajectory(seed, fields: FieldSet, params: SolverParams, domain: DomainSpec) -> Trajectory:
    """Trace the full stored trajectory of one seed (reference path).

    Backward states until x < -h, forward states until x > Lx + h; the
    crossing states themselves are not stored. m1 is the last index with
    x <= Lx.
    """
    k, xi, p0 = seed
    budget = params.step_budget(domain, fields.alpha)

    forward = [p0]
    p = p0
    m1 = 0
    steps = 0
    while True:
        p = euler_step(p, fields, params.ds, "forward")
        steps += 1
        if steps > budget:
            raise TrajectoryError(
                f"seed {k}: step budget {budget} exhausted at x = {p.pos[0]:.4g}"
            )
        if p.pos[0] > domain.Lx + params.h:
            break
        forward.append(p)
        if p.pos[0] <= domain.Lx:
            m1 = len(forward) - 1
    m2 = len(forward) - 1

    backward = []
    p = p0
    back_budget = math.ceil(params.h / (params.ds * fields.alpha)) + 2
    while len(backward) <= back_budget:
        p = euler_step(p, fields, params.ds, "backward")
        if p.pos[0] < -params.h:
            break
        backward.append(p)
    m0 = -len(backward)

    states = backward[::-1] + forward
    js = np.arange(m0, m2 + 1)
    return Trajectory(
        k=k,
        xi=xi,
        js=js,
        x=np.array([s.pos[0] for s in states]),
        y=np.array([s.pos[1] for s in states]),
        w=np.array([s.weight for s in states]),
        rho=np.array([s.mass for s in states]),
        m0=m0,
        m1=m1,
        m2=m2,
    )


def trace_all(
    fields: FieldSet,
    params: SolverParams,
    domain: DomainSpec,
    *,
    skip_dry: bool = False,
) -> ParticleStore:
    """Trace every seed in lockstep (vectorised over seeds).

    Equivalent to mapping :func:`trace_trajectory` over
    :func:`seed_particles`, but advances all live seeds with one array
    operation per step and assembles the flat (k, j)-sorted store
    directly.
    """
    check_weight_positivity(fields, params, domain)
    seeds, skipped = seed_particles(domain, params, fields, skip_dry=skip_dry)
    if not seeds:
        return ParticleStore.from_trajectories([], skipped=skipped)

    n = len(seeds)
    ks = np.array([s[0] for s in seeds], dtype=int)
    xi = np.array([s[1] for s in seeds])
    x = np.zeros(n)
    y = xi.copy()
    w = np.array([s[2].weight for s in seeds])
    rho = np.array([s[2].mass for s in seeds])
    budget = params.step_budget(domain, fields.alpha)

    blk_k, blk_j, blk_x, blk_y, blk_w, blk_rho = [], [], [], [], [], []

    def emit(idx, jval, xs_, ys_, ws_, rhos_):
        blk_k.append(ks[idx])
        blk_j.append(np.full(idx.size, jval, dtype=int))
        blk_x.append(xs_)
        blk_y.append(ys_)
        blk_w.append(ws_)
        blk_rho.append(rhos_)

    # Backward extension: exact translates with frozen omega, rho.
    if fields.extension_velocity is not None:
        a_ext = np.asarray(fields.extension_velocity, dtype=float)
        back_step = lambda pts: np.broadcast_to(a_ext, pts.shape)
    else:
        back_step = fields.velocity
    m0 = np.zeros(n, dtype=int)
    bx, by = x.copy(), y.copy()
    j = 0
    while True:
        a = back_step(np.column_stack([bx, by]))
        bx = bx - params.ds * a[:, 0]
        by = domain.wrap_y(by - params.ds * a[:, 1])
        j -= 1
        keep = np.flatnonzero(bx >= -params.h)
        if keep.size == 0:
            break
        emit(keep, j, bx[keep].copy(), by[keep].copy(), w[keep].copy(), rho[keep].copy())
        m0[keep] = j
        if j < -(budget + 1):
            raise TrajectoryError("backward extension exceeded the step budget")

    # Forward march with an active mask; each stored block is one j level.
    all_idx = np.arange(n)
    emit(all_idx, 0, x.copy(), y.copy(), w.copy(), rho.copy())
    m1 = np.zeros(n, dtype=int)
    m2 = np.zeros(n, dtype=int)
    active = all_idx
    j = 0
    while active.size:
        pts = np.column_stack([x[active], y[active]])
        a = fields.velocity(pts)
        div = fields.divergence(pts)
        a0 = fields.reaction(pts)
        src = fields.source(pts)
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(div))):
            bad = active[~np.all(np.isfinite(a), axis=1) | ~np.isfinite(div)]
            raise TrajectoryError(f"non-finite field values on seeds {ks[bad].tolist()}")
        x[active] = x[active] + params.ds * a[:, 0]
        y[active] = domain.wrap_y(y[active] + params.ds * a[:, 1])
        rho[active] = rho[active] * (1.0 - params.ds * a0) + params.ds * w[active] * src
        w[active] = w[active] * (1.0 + params.ds * div)
        j += 1
        if j > budget:
            raise TrajectoryError(
                f"step budget {budget} exhausted; stagnating seeds {ks[active].tolist()}"
            )
        keep = active[x[active] <= domain.Lx + params.h]
        if keep.size:
            emit(keep, j, x[keep].copy(), y[keep].copy(), w[keep].copy(), rho[keep].copy())
            m2[keep] = j
            inner = keep[x[keep] <= domain.Lx]
            m1[inner] = j
        active = keep

    k_arr = np.concatenate(blk_k)
    j_arr = np.concatenate(blk_j)
    order = np.lexsort((j_arr, k_arr))
    return ParticleStore(
        k=k_arr[order],
        j=j_arr[order],
        x=np.concatenate(blk_x)[order],
        y=np.concatenate(blk_y)[order],
        w=np.concatenate(blk_w)[order],
        rho=np.concatenate(blk_rho)[order],
        xi=xi,
        m0=m0,
        m1=m1,
        m2=m2,
        skipped=np.asarray(skipped, dtype=int),
    )


def characteristic_oracle(xi: float, s: float, fields: FieldSet, quad_n: int = 400) -> float:
    """Representation-formula value of u at arclength s on the characteristic from (0, xi).

    The characteristic is integrated with classical RK4 on quad_n uniform
    panels; I(t) = int_0^t (div a + a0) and the source integral use
    composite trapezoid on the same nodes, so the result is an oracle
    independent of the Euler particle recursion.
    """
    if quad_n < 1:
        raise ValueError("quad_n must be >= 1")
    dt = s / quad_n

    def rhs(pos):
        return fields.velocity(pos[None, :])[0]

    pos = np.array([0.0, xi])
    path = np.empty((quad_n + 1, 2))
    path[0] = pos
    for i in range(quad_n):
        k1 = rhs(pos)
        k2 = rhs(pos + 0.5 * dt * k1)
        k3 = rhs(pos + 0.5 * dt * k2)
        k4 = rhs(pos + dt * k3)
        pos = pos + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(pos)):
            raise TrajectoryError("characteristic integration went non-finite")
        path[i + 1] = pos

    wrapped = np.column_stack([path[:, 0], fields.domain.wrap_y(path[:, 1])])
    f = fields.divergence(wrapped) + fields.reaction(wrapped)
    src = fields.source(wrapped)

    incr = 0.5 * dt * (f[:-1] + f[1:])
    I = np.concatenate([[0.0], np.cumsum(incr)])
    integrand = src * np.exp(I)
    s_int = float(np.sum(0.5 * dt * (integrand[:-1] + integrand[1:])))
    g = float(fields.boundary(np.array([xi]))[0])
    return (g + s_int) * math.exp(-I[-1])
