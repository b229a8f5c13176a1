"""Coefficient bundles for the stationary transport problem.

A ``FieldSet`` packages the advecting velocity field, its divergence, the
reaction coefficient, the source and the inflow boundary data, all as
vectorised callables over arrays of points. Inside the domain the tilted
plane gives

    a = (tan(theta) - dz/dx, -dz/dy),

outside ([x < 0 or x > Lx]) the velocity is the constant extension
(tan(theta), 0) and divergence, reaction and source vanish.

Surfaces come in two flavours: closed-form test surfaces with exact
derivatives, and grid-backed surfaces whose derivatives are taken by
finite differences and served to particles through bilinear
interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import DomainSpec, ScalarGrid, grad_fd, interp_bilinear

__all__ = [
    "FieldSet",
    "AnalyticSurface",
    "flat_surface",
    "transverse_cosine_surface",
    "longitudinal_cosine_surface",
    "ridge_surface",
    "make_tilted_plane_field",
    "make_field",
    "divergence_grid",
    "DryInflowError",
]


class DryInflowError(RuntimeError):
    """Raised when the inflow boundary is characteristic (a1 <= 0)."""


@dataclass(frozen=True)
class FieldSet:
    """Immutable coefficient bundle (a, div a, a0, S, g).

    All callables accept points of shape (n, 2) (or a single (2,) point)
    and are safe for concurrent read-only use.
    """

    domain: DomainSpec
    velocity: Callable[[np.ndarray], np.ndarray]
    divergence: Callable[[np.ndarray], np.ndarray]
    reaction: Callable[[np.ndarray], np.ndarray]
    source: Callable[[np.ndarray], np.ndarray]
    boundary: Callable[[np.ndarray], np.ndarray]
    alpha: float  # declared lower bound of a1 on the inflow boundary
    may_have_dry_areas: bool = False
    label: str = "custom"
    # constant velocity outside [0, Lx]; None means "evaluate velocity()"
    extension_velocity: tuple[float, float] | None = None

    def velocity_at(self, points):
        return self.velocity(np.atleast_2d(np.asarray(points, dtype=float)))


def _as_points(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if not np.all(np.isfinite(pts)):
        raise ValueError("non-finite coordinates passed to a field evaluation")
    return pts


@dataclass(frozen=True)
class AnalyticSurface:
    """Closed-form surface perturbation z(x, y) with exact derivatives."""

    z: Callable[[np.ndarray, np.ndarray], np.ndarray]
    zx: Callable[[np.ndarray, np.ndarray], np.ndarray]
    zy: Callable[[np.ndarray, np.ndarray], np.ndarray]
    zlap: Callable[[np.ndarray, np.ndarray], np.ndarray]  # zxx + zyy
    max_abs_zx: float
    label: str = "analytic"


def flat_surface() -> AnalyticSurface:
    zero = lambda x, y: np.zeros_like(np.asarray(x, dtype=float))
    return AnalyticSurface(zero, zero, zero, zero, 0.0, "flat")


def transverse_cosine_surface(amplitude: float, n_periods: int, Ly: float) -> AnalyticSurface:
    """z(x, y) = amplitude * cos(2 pi n (y - Ly/2) / Ly)."""
    k = 2.0 * math.pi * n_periods / Ly

    def z(x, y):
        return amplitude * np.cos(k * (y - Ly / 2.0)) + np.zeros_like(np.asarray(x, float))

    def zx(x, y):
        return np.zeros_like(np.asarray(x, dtype=float))

    def zy(x, y):
        return -amplitude * k * np.sin(k * (y - Ly / 2.0)) + np.zeros_like(np.asarray(x, float))

    def zlap(x, y):
        return -amplitude * k * k * np.cos(k * (y - Ly / 2.0)) + np.zeros_like(np.asarray(x, float))

    return AnalyticSurface(z, zx, zy, zlap, 0.0, f"cos_y{n_periods}")


def longitudinal_cosine_surface(amplitude: float, n_half_periods: int, Lx: float) -> AnalyticSurface:
    """z(x, y) = amplitude * cos(pi n x / Lx) (x-only variation)."""
    k = math.pi * n_half_periods / Lx

    def z(x, y):
        return amplitude * np.cos(k * np.asarray(x, float)) + np.zeros_like(np.asarray(y, float))

    def zx(x, y):
        return -amplitude * k * np.sin(k * np.asarray(x, float)) + np.zeros_like(np.asarray(y, float))

    def zy(x, y):
        return np.zeros_like(np.asarray(x, dtype=float))

    def zlap(x, y):
        return -amplitude * k * k * np.cos(k * np.asarray(x, float)) + np.zeros_like(np.asarray(y, float))

    return AnalyticSurface(z, zx, zy, zlap, abs(amplitude) * k, f"cos_x{n_half_periods}")


def ridge_surface(amplitude: float, Ly: float) -> AnalyticSurface:
    """Two-ridge transverse surface z = amplitude * cos(4 pi (y - Ly/2) / Ly)."""
    return transverse_cosine_surface(amplitude, 2, Ly)


def divergence_grid(z: ScalarGrid) -> ScalarGrid:
    """div a = -(zxx + zyy) for a grid-backed surface, via grad_fd twice."""
    zx, zy = grad_fd(z)
    zxx, _ = grad_fd(zx)
    _, zyy = grad_fd(zy)
    return z.like(-(zxx.values + zyy.values))


def _constant_source(value: float, domain: DomainSpec):
    def src(points):
        pts = _as_points(points)
        inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= domain.Lx)
        return np.where(inside, value, 0.0)

    return src


def make_tilted_plane_field(
    theta: float,
    z,
    u0: float,
    r,
    domain: DomainSpec,
    V: float = 1.0,
    label: str | None = None,
) -> FieldSet:
    """Build the tilted-plane FieldSet from a surface perturbation.

    Parameters
    ----------
    theta : plane inclination in radians.
    z : None (flat), AnalyticSurface, or ScalarGrid (finite-difference path).
    u0 : constant inflow value of the solution.
    r : source, a constant or a callable of points.
    domain : the computational rectangle.
    V : velocity scale multiplying (tan theta - grad z).
    """
    tant = math.tan(theta)
    if z is None:
        z = flat_surface()

    if isinstance(z, ScalarGrid):
        if not np.all(np.isfinite(z.values)):
            raise ValueError("surface grid contains non-finite values")
        zx_g, zy_g = grad_fd(z)
        div_g = divergence_grid(z)
        max_abs_zx = float(np.abs(zx_g.values).max())
        surf_label = "grid"

        def vel_inside(pts):
            ax = V * (tant - interp_bilinear(zx_g, pts))
            ay = -V * interp_bilinear(zy_g, pts)
            return np.column_stack([ax, ay])

        def div_inside(pts):
            return V * interp_bilinear(div_g, pts)

    elif isinstance(z, AnalyticSurface):
        max_abs_zx = z.max_abs_zx
        surf_label = z.label

        def vel_inside(pts):
            ax = V * (tant - z.zx(pts[:, 0], pts[:, 1]))
            ay = -V * z.zy(pts[:, 0], pts[:, 1])
            return np.column_stack([ax, ay])

        def div_inside(pts):
            return -V * z.zlap(pts[:, 0], pts[:, 1])

    else:
        raise TypeError(f"unsupported surface type {type(z)!r}")

    dry_flag = not (tant > max_abs_zx)

    def velocity(points):
        pts = _as_points(points)
        out = np.empty_like(pts)
        inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= domain.Lx)
        if np.any(inside):
            out[inside] = vel_inside(pts[inside])
        if not np.all(inside):
            out[~inside, 0] = V * tant
            out[~inside, 1] = 0.0
        return out

    def divergence(points):
        pts = _as_points(points)
        out = np.zeros(len(pts))
        inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= domain.Lx)
        if np.any(inside):
            out[inside] = div_inside(pts[inside])
        return out

    def reaction(points):
        return np.zeros(len(_as_points(points)))

    if callable(r):
        r_fn = r

        def source(points):
            pts = _as_points(points)
            inside = (pts[:, 0] >= 0.0) & (pts[:, 0] <= domain.Lx)
            return np.where(inside, r_fn(pts), 0.0)

    else:
        source = _constant_source(float(r), domain)

    if callable(u0):
        g_fn = u0

        def boundary(xi):
            return np.asarray(g_fn(np.asarray(xi, dtype=float)), dtype=float)

    else:
        def boundary(xi):
            return np.full(np.shape(np.atleast_1d(xi)), float(u0))

    # Sample a1 on the inflow boundary for the declared lower bound, and
    # check positivity at grid nodes when the slope condition holds.
    xi_s = np.linspace(0.0, domain.Ly, 257)
    a1_in = vel_inside(np.column_stack([np.zeros_like(xi_s), xi_s]))[:, 0]
    alpha = float(a1_in.min())
    if alpha <= 0.0:
        raise DryInflowError(
            f"inflow boundary is characteristic: min a1(0, xi) = {alpha:.3g} <= 0"
        )
    if not dry_flag:
        probe_x = np.linspace(0.0, domain.Lx, 65)
        probe_y = np.linspace(0.0, domain.Ly, 33)
        xx, yy = np.meshgrid(probe_x, probe_y, indexing="ij")
        ax = vel_inside(np.column_stack([xx.ravel(), yy.ravel()]))[:, 0]
        assert ax.min() > 0.0, "a1 must stay positive when tan(theta) > max|dz/dx|"

    return FieldSet(
        domain=domain,
        velocity=velocity,
        divergence=divergence,
        reaction=reaction,
        source=source,
        boundary=boundary,
        alpha=alpha,
        may_have_dry_areas=dry_flag,
        label=label or f"tilted_{surf_label}",
        extension_velocity=(V * tant, 0.0),
    )


def make_field(
    domain: DomainSpec,
    velocity,
    divergence,
    reaction=None,
    source=None,
    boundary=None,
    alpha: float | None = None,
    label: str = "custom",
) -> FieldSet:
    """Assemble a FieldSet from raw callables (test and oracle helper)."""
    zero = lambda pts: np.zeros(len(_as_points(pts)))

    def wrap_pointfun(fn):
        def wrapped(points):
            return np.asarray(fn(_as_points(points)), dtype=float)

        return wrapped

    vel = wrap_pointfun(velocity)
    if alpha is None:
        xi_s = np.linspace(0.0, domain.Ly, 129)
        alpha = float(vel(np.column_stack([np.zeros_like(xi_s), xi_s]))[:, 0].min())
    if alpha <= 0:
        raise DryInflowError(f"min a1(0, xi) = {alpha:.3g} <= 0")
    bnd = boundary if boundary is not None else (lambda xi: np.zeros_like(np.atleast_1d(xi)))
    return FieldSet(
        domain=domain,
        velocity=vel,
        divergence=wrap_pointfun(divergence) if divergence is not None else zero,
        reaction=wrap_pointfun(reaction) if reaction is not None else zero,
        source=wrap_pointfun(source) if source is not None else zero,
        boundary=lambda xi: np.asarray(bnd(np.asarray(xi, dtype=float)), dtype=float),
        alpha=float(alpha),
        label=label,
    )
