"""Coupled landscape evolution: water height, sediment load, topography.

Each time step linearises the coupling: the velocity field is frozen at
the previous state, the stationary water-height and sediment-load
equations are solved by the particle method, and the topography is
advanced by explicit Euler with creep diffusion, stream-incision erosion
and sediment redeposition:

    div(h_{i+1} v_i) = r
    div(q_{i+1} v_i) = rho_s e (h_i/H)^m (|v_i|/V)^n - rho_s s c_i/c_sat
    z_{i+1} = z_i + dt (K lap z_i - e (h_i/H)^m (|v_i|/V)^n + s c_i/c_sat)
    v_i = V (tan theta, 0) - V grad(h_i + z_i)

with q = c h, inflow data h = h0 and q = c0 h0, and c_{i+1} = q/h where
the water column exceeds the dry threshold (zero elsewhere).
"""

from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .fields import FieldSet
from .grid import DomainSpec, ScalarGrid, grad_fd, interp_bilinear, laplacian_fd
from .kernel import KernelSpec
from .particles import ParticleStore, SolverParams, trace_all
from .reconstruct import build_cell_list, evaluate_grid

logger = logging.getLogger(__name__)

__all__ = [
    "K_EROSIVE",
    "LandscapeParams",
    "LandscapeState",
    "Perturbation",
    "init_state",
    "landscape_step",
    "run_evolution",
    "amplitude",
]

# creep constant of the stable reference regime, m^2/s
K_EROSIVE = 5e-4 / 3600.0


@dataclass(frozen=True)
class LandscapeParams:
    """Physical and numerical parameters of the evolution run.

    Defaults are the desk-scale experiment values: a 40 cm x 10 cm
    plaster plane tilted at 39 degrees under a 0.5 mm water film.
    ``H`` is the characteristic water height entering the incision law;
    the boundary film height is the only height scale available, so it
    defaults to ``h0``.
    """

    Lx: float = 0.40
    Ly: float = 0.10
    V: float = 1.0
    m: float = 1.6
    n: float = 3.2
    rho_s: float = 2.17e6
    c_sat: float = 3.17e5
    e: float = 0.5e-3 / 3600.0
    s: float = 0.5e-3 / 3600.0 / 2000.0
    theta: float = math.radians(39.0)
    h0: float = 0.5e-3
    c0: float = 317.0
    K: float = K_EROSIVE
    H: float = 0.5e-3
    r: float = 0.0
    dt: float = 4.5
    nx: int = 400
    ny: int = 100
    kernel_h: float | None = None  # default Ly/4
    eps_ratio: float = 0.1  # eps = eps_ratio * kernel_h
    ds: float = 0.005
    dry_fraction: float = 1e-3  # h_dry = dry_fraction * h0

    def __post_init__(self):
        for name in ("V", "m", "n", "rho_s", "c_sat", "e", "s", "h0", "dt"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    @property
    def domain(self) -> DomainSpec:
        return DomainSpec(self.Lx, self.Ly)

    @property
    def h_kernel(self) -> float:
        return self.kernel_h if self.kernel_h is not None else self.Ly / 4.0

    @property
    def h_dry(self) -> float:
        return self.dry_fraction * self.h0

    def solver_params(self) -> SolverParams:
        return SolverParams(h=self.h_kernel, eps=self.eps_ratio * self.h_kernel, ds=self.ds)

    def diffusion_substeps(self) -> int:
        if self.K == 0.0:
            return 1
        dx = self.Lx / self.nx
        dy = self.Ly / self.ny
        dt_stable = 1.0 / (2.0 * self.K * (1.0 / dx ** 2 + 1.0 / dy ** 2))
        return max(1, math.ceil(self.dt / dt_stable))


@dataclass(frozen=True)
class Perturbation:
    """Random channel grooves dug into the initial plane."""

    amplitude: float = 5e-5
    n_channels: int = 3
    width: float = 8e-3
    rng_seed: int = 0


@dataclass
class LandscapeState:
    z: ScalarGrid
    h: ScalarGrid
    c: ScalarGrid
    i: int = 0

    def time(self, params: "LandscapeParams") -> float:
        return self.i * params.dt


def amplitude(z: ScalarGrid) -> float:
    return float(z.values.max() - z.values.min())


def init_state(params: LandscapeParams, pert: Perturbation) -> LandscapeState:
    """Initial triple: grooved plane, compensating water film, uniform sediment.

    z is a sum of negative Gaussian grooves aligned with x (periodic
    minimum-image profile in y) and h = h0 - z, so the initial free
    surface h + z is exactly the constant h0.
    """
    if pert.amplitude < 0:
        raise ValueError("perturbation amplitude must be >= 0")
    if pert.amplitude > 0.5 * params.h0:
        logger.warning(
            "perturbation amplitude %.3g is not small against h0 = %.3g",
            pert.amplitude, params.h0,
        )
    nx, ny, Lx, Ly = params.nx, params.ny, params.Lx, params.Ly
    z = np.zeros((nx, ny))
    if pert.amplitude > 0 and pert.n_channels > 0:
        rng = np.random.default_rng(pert.rng_seed)
        centers = rng.uniform(0.0, Ly, size=pert.n_channels)
        ys = np.arange(ny) * Ly / ny
        profile = np.zeros(ny)
        for yc in centers:
            d = np.abs(ys - yc)
            d = np.minimum(d, Ly - d)
            profile -= pert.amplitude * np.exp(-0.5 * (d / pert.width) ** 2)
        z += profile[None, :]
    h = params.h0 - z
    if h.min() <= 0:
        raise ValueError("initial water height would be non-positive")
    zg = ScalarGrid(nx, ny, Lx, Ly, z)
    hg = ScalarGrid(nx, ny, Lx, Ly, h)
    cg = ScalarGrid.constant(nx, ny, Lx, Ly, params.c0)
    return LandscapeState(zg, hg, cg, 0)


def _velocity_fieldset(params: LandscapeParams, eta: ScalarGrid, source_grid: ScalarGrid | None,
                       g_value: float, label: str) -> FieldSet:
    """Grid-backed transport coefficients for the frozen velocity v_i."""
    V, tant = params.V, math.tan(params.theta)
    etax, etay = grad_fd(eta)
    vx = eta.like(V * (tant - etax.values))
    vy = eta.like(-V * etay.values)
    dvx, _ = grad_fd(vx)
    _, dvy = grad_fd(vy)
    divv = eta.like(dvx.values + dvy.values)
    dom = params.domain

    def velocity(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty_like(pts)
        inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= dom.Lx)
        if np.any(inside):
            out[inside, 0] = interp_bilinear(vx, pts[inside])
            out[inside, 1] = interp_bilinear(vy, pts[inside])
        out[~inside, 0] = V * tant
        out[~inside, 1] = 0.0
        return out

    def divergence(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        res = np.zeros(len(pts))
        inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= dom.Lx)
        if np.any(inside):
            res[inside] = interp_bilinear(divv, pts[inside])
        return res

    def source(points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if source_grid is None:
            return np.zeros(len(pts))
        res = np.zeros(len(pts))
        inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= dom.Lx)
        if np.any(inside):
            res[inside] = interp_bilinear(source_grid, pts[inside])
        return res

    a1 = vx.values[0, :]
    alpha = float(a1.min())

    return FieldSet(
        domain=dom,
        velocity=velocity,
        divergence=divergence,
        reaction=lambda pts: np.zeros(len(np.atleast_2d(pts))),
        source=source,
        boundary=lambda xi: np.full(np.shape(np.atleast_1d(xi)), g_value),
        alpha=max(alpha, 1e-12),
        may_have_dry_areas=alpha <= 0,
        label=label,
        extension_velocity=(V * tant, 0.0),
    )


def _erosion_rate(params: LandscapeParams, h: ScalarGrid, speed: np.ndarray) -> np.ndarray:
    """Stream-incision rate e (h/H)^m (|v|/V)^n, zero on dry nodes, in m/s."""
    hv = np.clip(h.values, 0.0, None)
    rate = params.e * (hv / params.H) ** params.m * (speed / params.V) ** params.n
    rate[h.values <= params.h_dry] = 0.0
    return rate


@dataclass
class StepDiagnostics:
    store_h: ParticleStore
    store_q: ParticleStore
    inflow: float
    outflow: float
    n_substeps_diffusion: int


def landscape_step(state: LandscapeState, params: LandscapeParams,
                   return_diagnostics: bool = False):
    """Advance (z, h, c) by one linearised time step."""
    dom = params.domain
    sp = params.solver_params()
    kernel = KernelSpec(sp.h)
    tant = math.tan(params.theta)

    eta = state.z.like(state.h.values + state.z.values)
    vx_in = params.V * (tant - grad_fd(eta)[0].values[0, :])
    if vx_in.min() <= 0:
        raise RuntimeError(
            "characteristic inflow boundary: v_x(0, y) <= 0, the stationary "
            "solve is not well posed"
        )

    # water height h_{i+1}
    fields_h = _velocity_fieldset(params, eta, None, params.h0, "landscape_h")
    if params.r != 0.0:
        rval = params.r
        fields_h = replace(
            fields_h,
            source=lambda pts, _r=rval: np.where(
                (np.atleast_2d(pts)[:, 0] >= 0) & (np.atleast_2d(pts)[:, 0] <= dom.Lx), _r, 0.0
            ),
        )
    store_h = trace_all(fields_h, sp, dom, skip_dry=True)
    cells_h = build_cell_list(store_h, sp.h, dom)
    target = ScalarGrid.constant(params.nx, params.ny, params.Lx, params.Ly, 0.0)
    h_new = evaluate_grid(store_h, cells_h, kernel, target)

    # sediment load q_{i+1} = (c h)_{i+1}, source frozen at state i
    etax, etay = grad_fd(eta)
    speed = params.V * np.hypot(tant - etax.values, etay.values)
    erosion = _erosion_rate(params, state.h, speed)
    deposition = params.s * state.c.values / params.c_sat
    sc_grid = state.z.like(params.rho_s * (erosion - deposition))
    fields_q = _velocity_fieldset(params, eta, sc_grid, params.c0 * params.h0, "landscape_q")
    store_q = trace_all(fields_q, sp, dom, skip_dry=True)
    q_new = evaluate_grid(store_q, build_cell_list(store_q, sp.h, dom), kernel, target)

    wet = h_new.values > params.h_dry
    c_vals = np.zeros_like(q_new.values)
    c_vals[wet] = np.clip(q_new.values[wet], 0.0, None) / h_new.values[wet]
    c_new = state.c.like(c_vals)

    # topography update: erosion/deposition once, creep possibly sub-stepped
    z_vals = state.z.values + params.dt * (deposition - erosion)
    n_sub = params.diffusion_substeps()
    if params.K > 0.0:
        sub_dt = params.dt / n_sub
        zg = state.z.like(z_vals)
        for _ in range(n_sub):
            zg = zg.like(zg.values + sub_dt * params.K * laplacian_fd(zg).values)
        z_vals = zg.values
    z_new = state.z.like(z_vals)

    new_state = LandscapeState(z_new, h_new, c_new, state.i + 1)
    if not return_diagnostics:
        return new_state

    dy = params.Ly / params.ny
    vx_grid = params.V * (tant - etax.values)
    inflow = float(np.sum(h_new.values[0, :] * vx_grid[0, :]) * dy)
    outflow = float(np.sum(h_new.values[-1, :] * vx_grid[-1, :]) * dy)
    diag = StepDiagnostics(store_h, store_q, inflow, outflow, n_sub)
    return new_state, diag


def _warn_substep_once(params: LandscapeParams, n_sub: int, warned=set()):
    key = (params.K, params.dt, params.nx, params.ny)
    if n_sub > 1 and key not in warned:
        warned.add(key)
        logger.warning(
            "explicit creep diffusion is unstable at dt = %.3g; sub-stepping x%d",
            params.dt, n_sub,
        )


def run_evolution(
    params: LandscapeParams,
    pert: Perturbation,
    n_steps: int,
    snapshot_every: int = 0,
    out_dir: str | None = None,
):
    """Run the evolution loop; returns (final_state, amplitude_series).

    The amplitude series rows are (step, time_s, amplitude_m), recorded
    every step starting from the initial state. Snapshots (z, h, c and
    particle CSVs plus a meta file) are written every ``snapshot_every``
    steps when ``out_dir`` is given.
    """
    state = init_state(params, pert)
    _warn_substep_once(params, params.diffusion_substeps())
    series = [(0, 0.0, amplitude(state.z))]

    def snap(st: LandscapeState, diag: StepDiagnostics | None):
        if not out_dir or not snapshot_every:
            return
        if st.i % snapshot_every != 0 and st.i != n_steps:
            return
        d = os.path.join(out_dir, f"step_{st.i}")
        os.makedirs(d, exist_ok=True)
        st.z.to_csv(os.path.join(d, "z.csv"))
        st.h.to_csv(os.path.join(d, "h.csv"))
        st.c.to_csv(os.path.join(d, "c.csv"))
        if diag is not None:
            diag.store_h.to_csv(os.path.join(d, "particles.csv"))
        with open(os.path.join(d, "meta"), "w") as f:
            f.write(f"step = {st.i}\ntime_s = {st.i * params.dt:.12g}\n")
            f.write(f"amplitude_m = {amplitude(st.z):.12g}\n")
            for key in ("Lx", "Ly", "nx", "ny", "dt", "K", "h0", "c0"):
                f.write(f"{key} = {getattr(params, key)!r}\n")

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    snap(state, None)

    for _ in range(n_steps):
        state, diag = landscape_step(state, params, return_diagnostics=True)
        series.append((state.i, state.i * params.dt, amplitude(state.z)))
        snap(state, diag)

    if out_dir:
        with open(os.path.join(out_dir, "amplitude.csv"), "w") as f:
            f.write("step,time_s,amplitude_m\n")
            for row in series:
                f.write(f"{row[0]},{row[1]:.12g},{row[2]:.12g}\n")
    return state, np.array(series)
