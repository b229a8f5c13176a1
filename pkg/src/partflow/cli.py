"""Command-line entry point: solve, sweep, landscape, selftest."""

from __future__ import annotations

import argparse
import math
import os
import sys
import time

import numpy as np

from .config import RunConfig, write_meta
from .landscape import K_EROSIVE, LandscapeParams, Perturbation, run_evolution
from .pipeline import DEFAULT_FACTORS, run_solve, run_sweep, sweep_records_to_csv


def _load_config(args) -> RunConfig:
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig({})
    if args.seed is not None:
        cfg.data["seed"] = str(args.seed)
    if args.threads is not None:
        cfg.data["threads"] = str(args.threads)
    cfg.override(args.override or [])
    return cfg


def _fail(out_dir: str | None, exc: BaseException) -> int:
    record = f"error = {type(exc).__name__}: {exc}"
    print(record, file=sys.stderr)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "error"), "w") as f:
            f.write(record + "\n")
    return 1


def cmd_solve(args) -> int:
    cfg = _load_config(args)
    try:
        res = run_solve(cfg, out_dir=args.out)
    except Exception as exc:
        return _fail(args.out, exc)
    if res["error"] is not None:
        print(f"case={cfg.case} linf_relative_error={res['error']:.6g} "
              f"particles={res['n_particles']} runtime={res['runtime']:.2f}s")
        threshold = cfg.get_float("solve.max_error")
        if threshold is not None and res["error"] > threshold:
            print(f"error {res['error']:.3g} exceeds solve.max_error={threshold:.3g}",
                  file=sys.stderr)
            return 1
    else:
        print(f"case={cfg.case} (no reference) particles={res['n_particles']} "
              f"runtime={res['runtime']:.2f}s")
    return 0


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    protocols = args.protocols.split(",") if args.protocols else ["a", "b", "c", "d"]
    os.makedirs(args.out, exist_ok=True)
    status = 0
    for proto in protocols:
        factors = None
        raw = cfg.get(f"sweep.factors_{proto}") or cfg.get("sweep.factors")
        if raw:
            factors = [int(tok) for tok in raw.split(",")]
        records = run_sweep(cfg, proto, factors=factors, threads=cfg.threads)
        path = os.path.join(args.out, f"sweep_{proto}.csv")
        sweep_records_to_csv(records, cfg, path)
        n_fail = sum(1 for r in records if not r["ok"])
        print(f"protocol {proto}: {len(records)} runs, {n_fail} failed -> {path}")
        for rec in records:
            if not rec["ok"]:
                print(f"  p={rec['p']}: {rec['detail']}", file=sys.stderr)
        if n_fail == len(records):
            status = 1
    write_meta(os.path.join(args.out, "meta"), dict(cfg.data))
    return status


def _landscape_params(cfg: RunConfig) -> LandscapeParams:
    kwargs = {}
    mapping = {
        "landscape.Lx": ("Lx", float),
        "landscape.Ly": ("Ly", float),
        "landscape.K": ("K", float),
        "landscape.dt": ("dt", float),
        "landscape.nx": ("nx", int),
        "landscape.ny": ("ny", int),
        "landscape.h0": ("h0", float),
        "landscape.c0": ("c0", float),
        "landscape.H": ("H", float),
        "landscape.r": ("r", float),
        "landscape.kernel_h": ("kernel_h", float),
        "landscape.eps_ratio": ("eps_ratio", float),
        "landscape.ds": ("ds", float),
        "landscape.theta_deg": ("theta", lambda v: math.radians(float(v))),
    }
    for key, (name, conv) in mapping.items():
        raw = cfg.get(key)
        if raw is not None:
            kwargs[name] = conv(raw)
    return LandscapeParams(**kwargs)


def cmd_landscape(args) -> int:
    cfg = _load_config(args)
    try:
        params = _landscape_params(cfg)
        pert = Perturbation(
            amplitude=cfg.get_float("landscape.amplitude", 5e-5),
            n_channels=cfg.get_int("landscape.n_channels", 3),
            width=cfg.get_float("landscape.width", 8e-3),
            rng_seed=cfg.seed,
        )
        n_steps = cfg.get_int("landscape.steps", 200)
        every = cfg.get_int("landscape.snapshot_every", max(n_steps // 4, 1))
        t0 = time.perf_counter()
        state, series = run_evolution(params, pert, n_steps, snapshot_every=every,
                                      out_dir=args.out)
    except Exception as exc:
        return _fail(args.out, exc)
    a0, af = series[0, 2], series[-1, 2]
    ratio = af / a0 if a0 > 0 else float("nan")
    print(f"landscape: {n_steps} steps, K={params.K:.4g} m^2/s, "
          f"amplitude {a0:.4g} -> {af:.4g} m (ratio {ratio:.3f}), "
          f"runtime {time.perf_counter() - t0:.1f}s")
    if args.out:
        meta = dict(cfg.data)
        meta["derived.amplitude_initial_m"] = repr(float(a0))
        meta["derived.amplitude_final_m"] = repr(float(af))
        write_meta(os.path.join(args.out, "meta"), meta)
    return 0


def cmd_selftest(args) -> int:
    """Fast invariant checks runnable without pytest."""
    from .fields import make_tilted_plane_field, transverse_cosine_surface
    from .grid import DomainSpec, ScalarGrid
    from .kernel import KernelSpec, kernel_eval
    from .particles import SolverParams, trace_all
    from .reconstruct import build_cell_list, evaluate, evaluate_bruteforce, evaluate_grid
    from .reference import exact_flat, linf_relative_error, solve_fv_march

    failures = []

    def check(name, ok, detail=""):
        print(f"{'PASS' if ok else 'FAIL'} {name} {detail}")
        if not ok:
            failures.append(name)

    # kernel normalisation by tensor-grid quadrature
    spec = KernelSpec(0.025)
    n = 801
    xs = np.linspace(-spec.h, spec.h, n)
    dxq = xs[1] - xs[0]
    xx, yy = np.meshgrid(xs, xs, indexing="ij")
    total = kernel_eval(np.hypot(xx, yy), spec).sum() * dxq * dxq
    check("kernel-normalisation", abs(total - 1.0) < 1e-6, f"integral={total:.9f}")

    # flat solve against the closed form
    dom = DomainSpec(1.0, 0.25)
    cfg_field = make_tilted_plane_field(math.radians(39.0), None, 1e-3, 0.0, dom)
    params = SolverParams(h=1 / 40, eps=1 / 400, ds=1 / 200)
    store = trace_all(cfg_field, params, dom)
    cells = build_cell_list(store, params.h, dom)
    out = ScalarGrid.constant(100, 25, dom.Lx, dom.Ly, 0.0)
    u = evaluate_grid(store, cells, KernelSpec(params.h), out)
    err = linf_relative_error(u, exact_flat(1e-3, 0.0, math.radians(39.0), out))
    check("flat-plane-error", err < 5e-3, f"error={err:.3g}")

    # linked list vs brute force
    rng = np.random.default_rng(0)
    probes = np.column_stack([rng.uniform(0, 1, 50), rng.uniform(0, 0.25, 50)])
    fast = evaluate(store, cells, KernelSpec(params.h), probes)
    slow = evaluate_bruteforce(store, KernelSpec(params.h), probes, dom)
    rel = np.abs(fast - slow).max() / np.abs(slow).max()
    check("cell-list-vs-bruteforce", rel < 1e-12, f"rel={rel:.2e}")

    # FV flux balance on the source case
    f2 = make_tilted_plane_field(math.radians(39.0), None, 1e-3, 1 / 20.0, dom)
    _, bal = solve_fv_march(f2, 1e-3, 100, 25)
    check("fv-flux-balance", bal.defect < 1e-10, f"defect={bal.defect:.2e}")

    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="partflow",
                                     description="particle solver for stationary transport")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key/value config file")
        p.add_argument("--out", help="artifact output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--override", action="append", metavar="KEY=VALUE")

    p_solve = sub.add_parser("solve", help="run one case and report its error")
    common(p_solve)
    p_solve.set_defaults(fn=cmd_solve)

    p_sweep = sub.add_parser("sweep", help="run convergence sweep protocols")
    common(p_sweep)
    p_sweep.add_argument("--protocols", help="comma-separated subset of a,b,c,d")
    p_sweep.set_defaults(fn=cmd_sweep)

    p_land = sub.add_parser("landscape", help="run the landscape evolution loop")
    common(p_land)
    p_land.set_defaults(fn=cmd_landscape)

    p_self = sub.add_parser("selftest", help="fast invariant checks")
    common(p_self)
    p_self.set_defaults(fn=cmd_selftest)

    args = parser.parse_args(argv)
    if args.command == "sweep" and not args.out:
        parser.error("sweep requires --out")
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
