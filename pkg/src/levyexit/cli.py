"""Command-line front end.

Every subcommand writes its outputs under ``--out`` and records the full
effective configuration in a JSON file; ``--config FILE`` replays it.

Exit codes: 0 success, 1 usage, 2 validation failure, 3 invariant failure.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import secrets
import sys

import numpy as np

from . import bounds, fet_analytic, fet_mc, projection, scaling, verify
from .mobility import DEFAULT_CAP
from .parallel import block_rng
from .stepdist import StepLaw

SITES = {
    "KAIST": 0.53,
    "NCSU": 1.27,
    "New York City": 1.62,
    "Disney World": 1.20,
    "State fair": 1.81,
}
_SITE_KEYS = {k.lower().replace(" ", ""): k for k in SITES}

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_INVARIANT = 0, 1, 2, 3
# keys that do not affect outputs and are never replayed
_RUNTIME_KEYS = {"out", "workers", "config", "svg", "command", "func"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _alpha(text):
    a = float(text)
    if not 0.0 < a <= 2.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 2], got {a}")
    return a


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _c_d(text):
    v = float(text)
    if not 0.0 < v < 0.5:
        raise argparse.ArgumentTypeError(f"c_d must lie in (0, 1/2), got {v}")
    return v


def _floats(text):
    return [float(eval_pow(t)) for t in text.split(",") if t.strip()]


def eval_pow(token):
    """Parse ``1024``, ``1e4`` or ``2^14``."""
    token = token.strip()
    if "^" in token:
        base, exp = token.split("^")
        return float(base) ** float(exp)
    return float(token)


def _n(text):
    v = eval_pow(text)
    if not v > 1:
        raise argparse.ArgumentTypeError(f"n must exceed 1, got {text}")
    return v


def _site(text):
    key = text.lower().replace(" ", "")
    if key not in _SITE_KEYS:
        raise argparse.ArgumentTypeError(f"unknown site {text!r}; choose from {sorted(SITES)}")
    return _SITE_KEYS[key]


def build_parser():
    p = _Parser(prog="levyexit", description="Levy flight/walk exit-time experiments")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, model=False, n=False, trials=None):
        g = sp.add_mutually_exclusive_group()
        g.add_argument("--alpha", type=_alpha)
        g.add_argument("--site", type=_site, help="alpha preset: " + ", ".join(SITES))
        sp.add_argument("--sigma", type=_positive, default=1.0)
        sp.add_argument("--c-d", dest="c_d", type=_c_d, default=0.25)
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--out", default=".")
        sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--svg", action="store_true", help="also write SVG figures")
        sp.add_argument("--config", default=None, help="replay a JSON sidecar")
        sp.add_argument("--cap", type=int, default=DEFAULT_CAP)
        if model:
            sp.add_argument("--model", choices=("flight", "walk"), default="flight")
        if n:
            sp.add_argument("--n", type=_n, default=2.0**14)
        if trials is not None:
            sp.add_argument("--trials", type=int, default=trials)

    sp = sub.add_parser("sample", help="raw step samples")
    common(sp, n=True, trials=1000)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("exit-times", help="one batch of exit times")
    common(sp, model=True, n=True, trials=10_000)
    sp.set_defaults(func=cmd_exit_times)

    sp = sub.add_parser("fit", help="exit-time scaling table and exponent fit")
    common(sp, model=True, trials=scaling.DEFAULT_TRIALS)
    sp.add_argument("--n-grid", type=_floats, default=list(scaling.DEFAULT_N_GRID))
    sp.add_argument("--statistic", choices=scaling.STATISTICS, default="q50")
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("phase-scan", help="walk exponent across alpha")
    common(sp, trials=scaling.DEFAULT_TRIALS)
    sp.add_argument("--alphas", type=_floats, default=[0.4, 0.7, 1.0, 1.4, 1.8])
    sp.add_argument("--n-grid", type=_floats, default=list(scaling.DEFAULT_N_GRID))
    sp.add_argument("--statistic", choices=scaling.STATISTICS, default="q50")
    sp.add_argument("--with-flight", action="store_true")
    sp.set_defaults(func=cmd_phase_scan)

    sp = sub.add_parser("analytic", help="eigenseries survival / exit-time CDF")
    common(sp, n=True, trials=0)
    sp.add_argument("--r", type=_positive, default=None, help="half-width (default c_d*sqrt(n))")
    sp.add_argument("--F", type=_positive, default=None,
                    help="diffusion coefficient (default E[(Z cos)^2]/2 of the step law)")
    sp.add_argument("--t-min", type=_positive, default=None)
    sp.add_argument("--t-max", type=_positive, default=None)
    sp.add_argument("--points", type=int, default=200)
    sp.set_defaults(func=cmd_analytic)

    sp = sub.add_parser("bounds", help="Hoeffding-style bounds vs Monte Carlo")
    common(sp, n=True, trials=100_000)
    sp.add_argument("--k-max", type=int, default=64)
    sp.add_argument("--epsilon", type=_positive, default=0.1)
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("verify", help="run the invariant suite")
    common(sp, trials=20_000)
    sp.add_argument("--fault", choices=sorted(verify.FAULTS), default=None,
                    help="inject a known defect (suite must then fail)")
    sp.set_defaults(func=cmd_verify)
    return p


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        with open(args.config) as fh:
            payload = json.load(fh)
        saved = payload.get("config", payload)
        if saved.get("command") not in (None, args.command):
            parser.error(f"config is for {saved.get('command')!r}, not {args.command!r}")
        sub = parser._subparsers._group_actions[0].choices[args.command]
        # saved values become defaults; flags given now still win
        sub.set_defaults(**{k: v for k, v in saved.items() if k not in _RUNTIME_KEYS})
        args = parser.parse_args(argv)
    if getattr(args, "site", None):
        args.alpha = SITES[args.site]
    if args.alpha is None and args.command not in ("verify", "phase-scan"):
        parser.error("one of --alpha or --site is required")
    if args.seed is None:
        args.seed = secrets.randbits(63)
    if hasattr(args, "trials") and args.trials < 0:
        parser.error("--trials must be non-negative")
    return args


def effective_config(args):
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _RUNTIME_KEYS}
    cfg["command"] = args.command
    return cfg


def _path(args, name):
    os.makedirs(args.out, exist_ok=True)
    return os.path.join(args.out, name)


def cmd_sample(args):
    law = StepLaw(args.alpha, args.n, args.sigma)
    rng = block_rng(args.seed, 0)
    z = law.sample(rng.random(args.trials))
    theta = 2.0 * math.pi * rng.random(args.trials)
    fet_mc.write_csv(_path(args, "samples.csv"), ("z", "theta"), zip(z.tolist(), theta.tolist()))
    out = {"config": effective_config(args), "rows": int(args.trials)}
    if args.alpha < 2.0:
        p = projection.ProjectedLaw(args.alpha, args.n)
        grid = np.geomspace(1.0, law.zmax, 60)
        rows = projection.projection_table(p, grid, z * np.abs(np.cos(theta)))
        fet_mc.write_csv(_path(args, "projection.csv"),
                         ("z", "ccdf_exact", "ccdf_limit", "ccdf_empirical"), rows)
        if args.svg:
            from . import plotting
            cols = np.array(rows)
            plotting.plot_ccdf(cols[:, 0], {"exact": cols[:, 1], "limit": cols[:, 2],
                                            "empirical": np.maximum(cols[:, 3], 1e-12)},
                               _path(args, "projection.svg"))
    fet_mc.write_json(_path(args, "samples.json"), out)
    return EXIT_OK


def cmd_exit_times(args):
    fet = fet_mc.run_batch(args.model, args.alpha, args.n, args.c_d, args.trials, args.seed,
                           sigma=args.sigma, cap=args.cap, workers=args.workers, validate=False)
    fet_mc.write_batch(fet, _path(args, "exit_times.csv"), _path(args, "exit_times.json"),
                       extra={"config": effective_config(args)})
    if fet.size:
        print(f"{args.model} alpha={args.alpha:g} n={args.n:g}: q10={fet.quantile(0.1):.6g} "
              f"q50={fet.quantile(0.5):.6g} q90={fet.quantile(0.9):.6g} "
              f"mean={fet.mean():.6g} abandoned={fet.abandoned}")
    if args.svg and fet.size:
        from . import plotting
        t = fet.sorted_times
        plotting.plot_cdf(t, {"empirical": np.arange(1, t.size + 1) / t.size},
                          _path(args, "exit_times.svg"))
    try:
        fet.validate()
    except fet_mc.BatchValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


def cmd_fit(args):
    table = scaling.run_scaling(args.model, args.alpha, args.n_grid, args.c_d, args.trials,
                                args.seed, sigma=args.sigma, cap=args.cap, workers=args.workers)
    fit = scaling.fit_exponent(table, args.statistic)
    fet_mc.write_csv(_path(args, "scaling.csv"),
                     ("n", "q10", "q50", "q90", "mean", "trials", "abandoned"), table.csv_rows())
    status = fit.status()
    summary = {"model": args.model, "alpha": args.alpha, "c_d": args.c_d, "slope": fit.slope,
               "stderr": fit.slope_stderr, "r2": fit.r_squared, "theoretical": fit.theoretical,
               "pass": status == "pass", "status": status, "statistic": args.statistic,
               "config": effective_config(args)}
    fet_mc.write_json(_path(args, "fit.json"), summary)
    print(f"{args.model} alpha={args.alpha:g}: slope={fit.slope:.4f} +- {fit.slope_stderr:.4f} "
          f"R2={fit.r_squared:.4f} theory={fit.theoretical:g} -> {status}")
    if args.svg:
        from . import plotting
        plotting.plot_scaling(table, fit, _path(args, "scaling.svg"), args.statistic)
    return EXIT_OK


def cmd_phase_scan(args):
    walk = scaling.phase_transition_scan(args.alphas, args.n_grid, args.c_d, args.trials,
                                         args.seed, statistic=args.statistic, workers=args.workers)
    flight = []
    if args.with_flight:
        flight = scaling.phase_transition_scan(args.alphas, args.n_grid, args.c_d, args.trials,
                                               args.seed, model="flight",
                                               statistic=args.statistic, workers=args.workers)
    rows = []
    for i, (a, f) in enumerate(walk):
        fl = flight[i][1] if flight else None
        rows.append((a, f.slope, f.slope_stderr, f.r_squared, f.theoretical,
                     fl.slope if fl else None, fl.theoretical if fl else None))
    fet_mc.write_csv(_path(args, "phase_scan.csv"),
                     ("alpha", "walk_slope", "walk_stderr", "walk_r2", "walk_theoretical",
                      "flight_slope", "flight_theoretical"), rows)
    summary = scaling.kink_summary(walk)
    summary["config"] = effective_config(args)
    fet_mc.write_json(_path(args, "phase_scan.json"), summary)
    for row in rows:
        print("alpha={:g} walk slope={:.4f} (theory {:g})".format(row[0], row[1], row[4]))
    print(f"kink at alpha=1: {summary['kink']}")
    if args.svg:
        from . import plotting
        plotting.plot_phase(walk, flight, _path(args, "phase_scan.svg"))
    return EXIT_OK


def cmd_analytic(args):
    law = StepLaw(args.alpha, args.n, args.sigma)
    r = args.r if args.r is not None else args.c_d * math.sqrt(args.n)
    F = args.F if args.F is not None else fet_analytic.matched_diffusivity(law)
    series = fet_analytic.SurvivalSeries(args.alpha, r, F)
    scale = r**args.alpha / F
    t_min = args.t_min if args.t_min is not None else 1e-3 * scale
    t_max = args.t_max if args.t_max is not None else 3.0 * scale
    t = np.geomspace(t_min, t_max, args.points)
    rows = series.table(t)
    fet_mc.write_csv(_path(args, "analytic.csv"), ("t", "survival", "fet_cdf"), rows)
    out = {"alpha": args.alpha, "r": r, "F": F, "decay_rate": series.decay_rate(),
           "config": effective_config(args)}
    curves = {"eigenseries": np.array([row[2] for row in rows])}
    if args.trials > 0:
        fet = fet_mc.run_projected_batch(args.alpha, args.n, r, args.trials, args.seed,
                                         sigma=args.sigma, workers=args.workers)
        emp = fet.cdf_at(t)
        curves["empirical (projected flight)"] = emp
        out["sup_distance"] = float(np.max(np.abs(emp - curves["eigenseries"])))
        fet_mc.write_csv(_path(args, "analytic_mc.csv"), ("t", "fet_cdf", "empirical"),
                         zip(t.tolist(), curves["eigenseries"].tolist(), emp.tolist()))
    fet_mc.write_json(_path(args, "analytic.json"), out)
    if args.svg:
        from . import plotting
        plotting.plot_cdf(t, curves, _path(args, "analytic.svg"))
    return EXIT_OK


def cmd_bounds(args):
    n = args.n
    r = args.c_d * math.sqrt(n)
    law = StepLaw(args.alpha, n, args.sigma)
    s2 = projection.projected_second_moment(law)
    fet = fet_mc.run_projected_batch(args.alpha, n, r / math.sqrt(2), args.trials, args.seed,
                                     sigma=args.sigma, workers=args.workers)
    ks = np.arange(1, args.k_max + 1)
    exit_rows = [(int(k), float(fet.cdf_at(k)), bounds.exit_time_tail_bound(r, k, s2)) for k in ks]
    fet_mc.write_csv(_path(args, "bounds_exit.csv"), ("k", "empirical", "bound"), exit_rows)
    disp = displacement_tail_mc(law, r, ks, args.trials, args.seed, args.workers)
    disp_rows = [(int(k), float(p), bounds.displacement_tail_bound(r, k, s2))
                 for k, p in zip(ks, disp)]
    fet_mc.write_csv(_path(args, "bounds_displacement.csv"), ("k", "empirical", "bound"), disp_rows)
    van = bounds.vanishing_check(args.alpha, args.epsilon, [2.0**k for k in range(10, 62, 2)],
                                 args.c_d, args.sigma)
    fet_mc.write_csv(_path(args, "vanishing.csv"), ("n", "horizon", "s2", "bound"), van.rows())

    def violations(rows):
        m = args.trials
        return [k for k, p, b in rows if p > b + 3 * math.sqrt(max(p * (1 - p), 1e-12) / m)]

    out = {"s2": s2, "exit_violations": violations(exit_rows),
           "displacement_violations": violations(disp_rows),
           "vanishing_from_index": van.decreasing_from, "config": effective_config(args)}
    fet_mc.write_json(_path(args, "bounds.json"), out)
    print(f"exit-time bound violations at k={out['exit_violations']}; "
          f"displacement bound violations at t={out['displacement_violations']}")
    if args.svg:
        from . import plotting
        plotting.plot_bounds(ks, [row[1] for row in exit_rows], np.array([row[2] for row in exit_rows]),
                             _path(args, "bounds_exit.svg"))
    return EXIT_OK


def displacement_tail_mc(law, r, times, trials, seed, workers=None):
    """Empirical ``P{|X_x(t)| >= r/sqrt2}`` at each ``t`` in ``times``."""
    times = np.asarray(times, dtype=int)
    rng = block_rng(seed, 17)
    hits = np.zeros(times.size)
    done = 0
    while done < trials:
        m = min(4096, trials - done)
        steps = law.sample(rng.random((m, int(times.max()))))
        x = np.cumsum(steps * np.cos(2 * math.pi * rng.random(steps.shape)), axis=1)
        hits += (np.abs(x[:, times - 1]) >= r / math.sqrt(2)).sum(axis=0)
        done += m
    return hits / trials


def cmd_verify(args):
    checks = verify.run_suite(args.seed, args.trials, args.workers, args.fault)
    for c in checks:
        print(c.line())
    ok = all(c.passed for c in checks)
    fet_mc.write_json(_path(args, "verify.json"),
                      {"passed": ok, "checks": [vars(c) for c in checks],
                       "config": effective_config(args)})
    return EXIT_OK if ok else EXIT_INVARIANT


def main(argv=None):
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except fet_mc.BatchValidationError as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
