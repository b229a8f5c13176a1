"""Radial cubic-spline smoothing kernel.

The kernel is the classic SPH cubic spline, rescaled so that its support
is exactly the closed disc of radius ``h`` and its plane integral equals 1:

    zeta_h(x) = sigma * W(2|x|/h),   sigma = 40 / (7 pi h^2),

with the shape function

    W(q) = 1 - (3/2) q^2 + (3/4) q^3     for 0 <= q <= 1,
         = (1/4) (2 - q)^3               for 1 <= q <= 2,
         = 0                             for q >= 2.

W is C^2 at the junctions q = 1 and q = 2, non-negative, and
2 pi * (h/2)^2 * int_0^2 W(q) q dq = sigma^-1, which fixes sigma above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["KernelSpec", "kernel_eval", "kernel_gradient_bound", "cubic_shape"]


def cubic_shape(q: np.ndarray) -> np.ndarray:
    """Dimensionless cubic-spline shape W(q), supported on [0, 2].

    Evaluated in the branch-free B-spline form
    W(q) = (2 - q)_+^3 / 4 - (1 - q)_+^3, which equals
    1 - (3/2)q^2 + (3/4)q^3 on [0, 1] and (1/4)(2 - q)^3 on [1, 2]
    identically, and is exactly zero for q >= 2.
    """
    q = np.asarray(q, dtype=float)
    a = np.clip(2.0 - q, 0.0, None)
    b = np.clip(1.0 - q, 0.0, None)
    return 0.25 * a * a * a - b * b * b


@dataclass(frozen=True)
class KernelSpec:
    """Smoothing kernel with support radius ``h`` (2D, unit integral)."""

    h: float
    dim: int = 2
    sigma: float = field(init=False)

    def __post_init__(self):
        if not (self.h > 0 and np.isfinite(self.h)):
            raise ValueError(f"kernel radius must be positive and finite, got {self.h}")
        if self.dim != 2:
            raise ValueError("only the 2D kernel is implemented")
        object.__setattr__(self, "sigma", 40.0 / (7.0 * np.pi * self.h * self.h))

    def __call__(self, r):
        return kernel_eval(r, self)


def kernel_eval(r, spec: KernelSpec):
    """Evaluate zeta_h at distance(s) ``r`` >= 0.

    Vectorised over ``r``; returns exactly 0 for r >= h. Raises on any
    negative distance.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise ValueError("kernel distances must be non-negative")
    return spec.sigma * cubic_shape(2.0 * r / spec.h)


def kernel_gradient_bound(spec: KernelSpec) -> float:
    """Maximum of |d zeta_h / dr| over all radii.

    d/dr zeta_h(r) = sigma * (2/h) * W'(2r/h) and |W'| attains its maximum
    of 1 at q = 2/3 (W'(q) = -3q + (9/4)q^2 on [0,1]), so the bound is
    2 sigma / h = 80 / (7 pi h^3).
    """
    return 2.0 * spec.sigma / spec.h
