"""Command-line entry point.

Subcommands: ``stencil``, ``profile``, ``run``, ``table``, ``scatter`` and
``compare``.  Exit codes: 0 on success, 1 for configuration errors, 2 when
a single (non-sweep) run diverges.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .analytic import SpecError
from .engine import ConfigError, DivergenceError, ErrorObserver, evolve, evolve_coupled, initial_state
from .baseline import split_step_evolve
from .config import load_plan
from .experiments import (
    COMPARE_COLUMNS,
    SCATTER_COLUMNS,
    TABLE_COLUMNS,
    compare_methods,
    run_scatter,
    run_table,
    wall_time_exponent,
    write_columns,
    write_csv,
)
from .metrics import error_profile
from .stencil import stencil_weights

logger = logging.getLogger("powerseries_nlse")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED = 0, 1, 2


def _out_dir(args, plan=None) -> Path:
    out = args.out or (plan.out_dir if plan is not None else None) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_stencil(args) -> int:
    lines = ["p,denominator,center,weights"]
    for p in args.p:
        t = stencil_weights(p)
        lines.append(f"{p},{t.denominator},{t.integer_center},{' '.join(str(w) for w in t.integer_weights)}")
    text = "\n".join(lines) + "\n"
    if args.out:
        path = _out_dir(args) / "stencils.csv"
        path.write_text(text)
    sys.stdout.write(text)
    return EXIT_OK


def _single_run(plan):
    cfg = plan.points()[0] if plan.sweep else plan.base
    start = initial_state(plan.oracle, cfg.grid)
    observer = ErrorObserver(plan.oracle, cfg.grid, stride=plan.stride)
    if plan.method == "split_step":
        final = (split_step_evolve(start, cfg.g1, cfg.g2, cfg.potential, cfg.dt, cfg.n_t, cfg.grid.L, [observer]),)
    elif cfg.components == 1:
        final = (evolve(start, cfg, observers=[observer]),)
    else:
        final = evolve_coupled(start, cfg, observers=[observer])
    return cfg, final, observer


def cmd_run(args) -> int:
    plan = load_plan(args.config)
    cfg, final, observer = _single_run(plan)
    out = _out_dir(args, plan)
    x = cfg.grid.x
    for k, st in enumerate(final):
        suffix = "" if len(final) == 1 else f"_{k + 1}"
        write_columns(out / f"{plan.name}_final{suffix}.csv", x=x, u=st.u, v=st.v, abs_psi=np.abs(st.psi))
    names = ["t"]
    for k in range(len(final)):
        suffix = "" if len(final) == 1 else f"_{k + 1}"
        names += [f"error_max{suffix}", f"error_rms{suffix}", f"norm{suffix}"]
    rows = np.array(observer.rows)
    write_columns(out / f"{plan.name}_series.csv", **{n: rows[:, j] for j, n in enumerate(names)})
    last = observer.rows[-1]
    print(f"{plan.name}: t={last[0]:.6g} error_max={last[1]:.6e} error_rms={last[2]:.6e}")
    return EXIT_OK


def cmd_profile(args) -> int:
    plan = load_plan(args.config)
    cfg, final, _ = _single_run(plan)
    exact = plan.oracle.evaluate(cfg.grid.x, final[0].t)
    if not isinstance(exact, tuple):
        exact = (exact,)
    out = _out_dir(args, plan)
    for k, (st, ex) in enumerate(zip(final, exact)):
        suffix = "" if len(final) == 1 else f"_{k + 1}"
        prof = error_profile(st.psi, ex)
        write_columns(out / f"{plan.name}_profile{suffix}.csv", x=cfg.grid.x, error=prof)
        print(f"{plan.name}{suffix}: max error {prof.max():.6e} at x={cfg.grid.x[np.argmax(prof)]:.6g}")
    return EXIT_OK


def cmd_table(args) -> int:
    plan = load_plan(args.config)
    rows = run_table(plan, jobs=args.jobs)
    path = write_csv(rows, _out_dir(args, plan) / f"{plan.name}_table.csv", TABLE_COLUMNS)
    for r in rows:
        rate = "" if r.R is None else f"{r.R:.5f}"
        print(f"n_x={r.n_x:6d} p={r.p:3d} s={r.s} dt={r.dt:.3g} rms={r.error_rms:.6e} max={r.error_max:.6e} R={rate} {r.status}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_scatter(args) -> int:
    plan = load_plan(args.config)
    rows = run_scatter(plan, jobs=args.jobs)
    out = _out_dir(args, plan)
    path = write_csv(rows, out / f"{plan.name}_scatter.csv", SCATTER_COLUMNS)
    for r in rows:
        if r.magnitude is not None:
            write_columns(out / f"{plan.name}_profile_nx{r.n_x}.csv", x=r.x, abs_psi=r.magnitude)
        print(f"n_x={r.n_x:6d} {r.outcome:12s} transmitted={r.transmitted_fraction:.4f} peak={r.peak_position:.3f}")
    print(f"wrote {path}")
    return EXIT_OK


def cmd_compare(args) -> int:
    plan = load_plan(args.config)
    rows = compare_methods(plan, jobs=args.jobs)
    path = write_csv(rows, _out_dir(args, plan) / f"{plan.name}_compare.csv", COMPARE_COLUMNS)
    for r in rows:
        print(f"{r.method:13s} n_t={r.n_t:7d} error_max={r.error_max:.6e} wall={r.wall_seconds:.3f}s {r.status}")
    try:
        print(f"power-series wall time ~ n_t^{wall_time_exponent(rows):.3f}")
    except ValueError:
        pass
    print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="powerseries-nlse", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config=True):
        if config:
            p.add_argument("--config", required=True, help="experiment file")
        p.add_argument("--out", help="output directory")
        p.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
        p.add_argument("--seed", type=int, default=None, help="reserved; no run is random")

    p = sub.add_parser("stencil", help="print integer stencil weights")
    p.add_argument("p", type=int, nargs="+")
    common(p, config=False)
    p.set_defaults(func=cmd_stencil)

    for name, func, helptext in (
        ("run", cmd_run, "single run: final state and error time series"),
        ("profile", cmd_profile, "single run: error profile at the final time"),
        ("table", cmd_table, "error/convergence table over the sweep"),
        ("scatter", cmd_scatter, "soliton scattering outcome per resolution"),
        ("compare", cmd_compare, "power series against split-step"),
    ):
        p = sub.add_parser(name, help=helptext)
        common(p)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, SpecError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as exc:
        print(f"diverged: {exc}", file=sys.stderr)
        return EXIT_DIVERGED


if __name__ == "__main__":
    sys.exit(main())
