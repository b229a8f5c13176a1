"""Case definitions and the seed-trace-reconstruct orchestration.

A "case" names a coefficient bundle from the linear test family: the
flat plane (with or without a constant source), the transverse and
longitudinal cosine perturbations, the two-ridge dry-area surface, or a
user-supplied surface grid. ``run_solve`` executes the particle solver
on a case and measures the sup-norm error against the case's reference
(closed form where one exists, the finite-volume march otherwise).
"""

from __future__ import annotations

import os
import time

import numpy as np

from . import __version__
from .config import DS_CHAR, EPS_CHAR, H_CHAR, RunConfig, write_meta
from .fields import (
    FieldSet,
    flat_surface,
    longitudinal_cosine_surface,
    make_tilted_plane_field,
    ridge_surface,
    transverse_cosine_surface,
)
from .grid import DomainSpec, ScalarGrid
from .kernel import KernelSpec
from .particles import SolverParams, trace_all
from .reconstruct import build_cell_list, evaluate_grid
from .reference import ErrorRecord, exact_flat, linf_relative_error, solve_fv_march

__all__ = ["build_case_field", "run_solve", "run_sweep", "SWEEP_PROTOCOLS"]

CASES = ("flat", "flat_source", "z1", "z2", "z3", "custom-grid")


def build_case_field(cfg: RunConfig) -> FieldSet:
    dom = DomainSpec(cfg.Lx, cfg.Ly)
    u0 = cfg.u0
    case = cfg.case
    if case in ("flat", "flat_source"):
        surf = flat_surface()
    elif case == "z1":
        surf = transverse_cosine_surface(u0 / 2.0, 1, dom.Ly)
    elif case == "z2":
        surf = longitudinal_cosine_surface(20.0 * u0, 8, dom.Lx)
    elif case == "z3":
        surf = ridge_surface(2.0 * u0, dom.Ly)
    elif case == "custom-grid":
        path = cfg.get("field.z_csv")
        if not path:
            raise ValueError("custom-grid case needs field.z_csv")
        nx = cfg.get_int("field.z_nx")
        ny = cfg.get_int("field.z_ny")
        if not nx or not ny:
            raise ValueError("custom-grid case needs field.z_nx and field.z_ny")
        surf = ScalarGrid.from_csv(path, nx, ny, dom.Lx, dom.Ly)
    else:
        raise ValueError(f"unknown case {case!r}; choose from {CASES}")
    return make_tilted_plane_field(cfg.theta, surf, u0, cfg.r, dom, label=case)


def reference_kind(cfg: RunConfig) -> str:
    default = {"flat": "exact", "flat_source": "exact", "z1": "fv", "z2": "fv"}.get(cfg.case, "none")
    return cfg.get("reference.kind", default)


def compute_reference(cfg: RunConfig, fields: FieldSet, out_grid: ScalarGrid) -> ScalarGrid | None:
    kind = reference_kind(cfg)
    if kind == "none":
        return None
    if kind == "exact":
        return exact_flat(cfg.u0, cfg.r, cfg.theta, out_grid)
    if kind == "fv":
        mult = cfg.get_int("reference.refine", 2)
        ref, _ = solve_fv_march(fields, cfg.u0, out_grid.nx * mult, out_grid.ny * mult)
        sub = ref.values[::mult, ::mult]
        return out_grid.like(sub)
    raise ValueError(f"unknown reference kind {kind!r}")


def run_solve(cfg: RunConfig, out_dir: str | None = None) -> dict:
    """Seed, trace and reconstruct one configuration.

    Returns a result dict with the reconstruction grid, the measured
    error (None when the case has no reference) and timings; writes
    u.csv, particles.csv and meta when ``out_dir`` is given.
    """
    t0 = time.perf_counter()
    fields = build_case_field(cfg)
    dom = fields.domain
    params = SolverParams(h=cfg.h, eps=cfg.eps, ds=cfg.ds)
    kernel = KernelSpec(params.h)

    store = trace_all(fields, params, dom, skip_dry=fields.may_have_dry_areas)
    t_trace = time.perf_counter()

    cells = build_cell_list(store, params.h, dom)
    out_grid = ScalarGrid.constant(cfg.out_nx, cfg.out_ny, dom.Lx, dom.Ly, 0.0)
    u = evaluate_grid(store, cells, kernel, out_grid)
    t_recon = time.perf_counter()

    ref = compute_reference(cfg, fields, out_grid)
    error = linf_relative_error(u, ref) if ref is not None else None
    t_end = time.perf_counter()

    result = {
        "u": u,
        "store": store,
        "error": error,
        "n_particles": len(store),
        "runtime": t_end - t0,
        "time_trace": t_trace - t0,
        "time_reconstruct": t_recon - t_trace,
    }

    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        u.to_csv(os.path.join(out_dir, "u.csv"))
        store.to_csv(os.path.join(out_dir, "particles.csv"))
        meta = dict(cfg.data)
        meta.setdefault("case", cfg.case)
        meta.setdefault("domain.Lx", repr(dom.Lx))
        meta.setdefault("domain.Ly", repr(dom.Ly))
        meta.setdefault("field.u0", repr(cfg.u0))
        meta.setdefault("field.r", repr(cfg.r))
        meta.setdefault("solver.h", repr(params.h))
        meta.setdefault("solver.eps", repr(params.eps))
        meta.setdefault("solver.ds", repr(params.ds))
        meta.setdefault("output.nx", str(cfg.out_nx))
        meta.setdefault("output.ny", str(cfg.out_ny))
        meta["derived.eps_effective"] = repr(params.eps_effective(dom))
        meta["derived.n_particles"] = str(len(store))
        meta["derived.error"] = "" if error is None else repr(error)
        meta["derived.runtime_s"] = f"{result['runtime']:.4f}"
        meta["derived.version"] = __version__
        write_meta(os.path.join(out_dir, "meta"), meta)
    return result


# protocol -> (description, axis assignments as functions of the 2^p factor)
SWEEP_PROTOCOLS = {
    "a": "h = f*h_char, eps = h/10, ds = 4*eps",
    "b": "h = f*h_char, eps = eps_char, ds = 4*eps_char",
    "c": "h = h_char, eps = f*eps_char, ds = 4*eps",
    "d": "h = h_char, eps = eps_char, ds = f*ds_char",
}

DEFAULT_FACTORS = {
    "a": range(-4, 5),
    "b": range(-4, 5),
    "c": range(-2, 4),
    "d": range(-5, 6),
}


def sweep_point(cfg: RunConfig, protocol: str, p: int) -> RunConfig:
    h_char = cfg.get_float("sweep.h_char", H_CHAR)
    eps_char = cfg.get_float("sweep.eps_char", EPS_CHAR)
    ds_char = cfg.get_float("sweep.ds_char", DS_CHAR)
    f = 2.0 ** p
    if protocol == "a":
        h, eps = f * h_char, f * h_char / 10.0
        ds = 4.0 * eps
    elif protocol == "b":
        h, eps, ds = f * h_char, eps_char, 4.0 * eps_char
    elif protocol == "c":
        h, eps = h_char, f * eps_char
        ds = 4.0 * eps
    elif protocol == "d":
        h, eps, ds = h_char, eps_char, f * ds_char
    else:
        raise ValueError(f"unknown sweep protocol {protocol!r}")
    point = RunConfig(dict(cfg.data))
    point.data["solver.h"] = repr(h)
    point.data["solver.eps"] = repr(eps)
    point.data["solver.ds"] = repr(ds)
    return point


def _sweep_worker(args):
    data, protocol, p = args
    cfg = RunConfig(data)
    point = sweep_point(cfg, protocol, p)
    t0 = time.perf_counter()
    try:
        res = run_solve(point)
        err = res["error"]
        if err is None:
            err = float("nan")
        ok = True
    except Exception as exc:  # per-point failures recorded, sweep continues
        err = float("nan")
        ok = False
        res = {"failure": f"{type(exc).__name__}: {exc}"}
    return {
        "protocol": protocol,
        "p": p,
        "h": point.h,
        "eps": point.eps,
        "ds": point.ds,
        "error": err,
        "runtime": time.perf_counter() - t0,
        "ok": ok,
        "detail": res.get("failure", ""),
    }


def run_sweep(cfg: RunConfig, protocol: str, factors=None, threads: int = 1) -> list[dict]:
    """Run one sweep protocol; returns the per-point records in order."""
    if factors is None:
        factors = DEFAULT_FACTORS[protocol]
    jobs = [(dict(cfg.data), protocol, p) for p in factors]
    if threads > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_sweep_worker, jobs))
    else:
        records = [_sweep_worker(j) for j in jobs]
    return records


def sweep_records_to_csv(records: list[dict], cfg: RunConfig, path) -> None:
    from .reference import SWEEP_HEADER

    with open(path, "w") as f:
        f.write(SWEEP_HEADER + "\n")
        for rec in records:
            case = cfg.case if rec["ok"] else f"{cfg.case}:failed"
            row = ErrorRecord(rec["h"], rec["eps"], rec["ds"],
                              rec["error"] if rec["ok"] else float("nan"),
                              rec["runtime"], case)
            f.write(row.csv_row() + "\n")
