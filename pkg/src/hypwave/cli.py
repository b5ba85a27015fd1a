"""hypwave command line.

Every command writes versioned CSV files plus exactly one manifest.json into
the output directory.  Exit codes: 0 when every assertion passes, 2 when an
assertion fails, 1 on usage or configuration errors.
"""
from __future__ import annotations

import argparse
import configparser
import sys
from contextlib import nullcontext
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .counterexample import (C_MIN, CounterexampleConfig, band_envelope, blowup_report,
                             build_sequences, diagonal_value, envelope_scale, h_half_norm_partial,
                             wide_approach_selector)
from .errors import HypwaveError, UsageError
from .experiments import band_sweep, convergence_table, gaussian_band, band_profile, focus_time_grid
from .geometry import (Annulus, Space, check_curve_conditions, curve_growth_bounds, parse_curve,
                       time_bound)
from .profiles import RadialProfile
from .propagator import PropagationRequest, chebyshev_times, pointwise_majorant, propagate_along_curve
from .reporting import RunRecorder, output_dir
from .specfun import (DEFAULT_R0, phi_anker_h3, phi_bessel_series, phi_closed_h3, phi_ode_table,
                      series_normalization)
from .transforms import (inversion_constant, l2_norm, plancherel_norm, riesz_identity_check, sft_forward,
                         sft_inverse)

EXIT_OK, EXIT_USAGE, EXIT_ASSERT = 0, 1, 2

RUN_KEYS = ("space", "annulus", "T", "curve", "tol", "seed", "threads")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _floats(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise UsageError(f"expected a comma separated list of numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", help="h3 | dr:m_v,m_z | rn:n")
    common.add_argument("--annulus", help="r1,r2")
    common.add_argument("--T", type=float, help="time bound")
    common.add_argument("--curve", help="vertical | parabolic:C7 | custom:file")
    common.add_argument("--tol", type=float)
    common.add_argument("--out", help="output directory (default $HYPWAVE_OUT or ./hypwave_out)")
    common.add_argument("--seed", type=int)
    common.add_argument("--threads", type=int, help="cap on BLAS worker threads")
    common.add_argument("--plot", action="store_true", help="also write SVG plots")
    common.add_argument("--config", help="key-value config file with [run] and command sections")

    parser = _Parser(prog="hypwave", description="Schrodinger maximal estimates on Damek-Ricci spaces")
    parser.add_argument("--version", action="version", version=f"hypwave {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("specfun", parents=[common], help="spherical functions by several routes")
    p.add_argument("--route", default="all", choices=["all", "closed", "ode", "series", "anker"])
    p.add_argument("--lambda", dest="lam", default="1")
    p.add_argument("--s", default="1")
    p.add_argument("--M", type=int, default=0, help="Bessel series truncation order")

    p = sub.add_parser("transform", parents=[common], help="forward and inverse spherical transform")
    p.add_argument("--gaussian", type=float, default=1.0, help="profile exp(-a s^2)")
    p.add_argument("--lam-max", type=float, default=16.0)

    p = sub.add_parser("propagate", parents=[common], help="field along a curve and sup over t")
    p.add_argument("--band", type=float, help="smooth band centred at N (default Gaussian band)")
    p.add_argument("--t-count", type=int, default=129)

    sub.add_parser("curvecheck", parents=[common], help="Holder and bilipschitz constants of a curve")
    sub.add_parser("counterexample", parents=[common], help="blow-up construction on H3")

    p = sub.add_parser("maxest", parents=[common], help="maximal ratio band sweep")
    p.add_argument("--N", default="16,32,64,128,256,512,1024")

    p = sub.add_parser("converge", parents=[common], help="convergence table e(tau)")
    p.add_argument("--tau", default="0.2,0.1,0.05,0.025")
    return parser


def _load_config(path: Optional[str]) -> configparser.ConfigParser:
    cfg = configparser.ConfigParser()
    if path:
        if not Path(path).is_file():
            raise UsageError(f"config file {path!r} not found")
        cfg.read(path)
    return cfg


DEFAULTS = {"space": "h3", "annulus": "1,2", "T": None, "curve": "vertical", "tol": None,
            "seed": 0, "threads": None}


def _resolve(args, cfg: configparser.ConfigParser) -> dict:
    """Command line beats the [run] section, which beats the defaults."""
    run = cfg["run"] if cfg.has_section("run") else {}
    out = {}
    for key in RUN_KEYS:
        val = getattr(args, key, None)
        if val is None and key in run:
            val = run[key]
        if val is None:
            val = DEFAULTS[key]
        out[key] = val
    for key in ("T", "tol"):
        if out[key] is not None:
            out[key] = float(out[key])
    for key in ("seed", "threads"):
        if out[key] is not None:
            out[key] = int(out[key])
    return out


def _space_record(space: Space) -> dict:
    rec = space.as_dict()
    rec["Q"] = float(space.Q)
    return rec


def _calibrate(rec: RunRecorder, space: Space, beta: Optional[float] = None):
    rec.config["space_parameters"] = _space_record(space)
    rec.calibration["inversion_constant"] = inversion_constant(space)
    rec.calibration["series_normalization"] = series_normalization(space)
    if beta is not None:
        rep = riesz_identity_check(lambda x: np.exp(-x ** 2 / 2), beta)
        rec.calibration["riesz_constant"] = rep.C_beta
        rec.calibration["riesz_residual"] = rep.residual


# ---------------------------------------------------------------- commands

def cmd_specfun(args, run, rec: RunRecorder):
    space = Space.parse(run["space"])
    tol = run["tol"] or 1e-8
    lams, radii = _floats(args.lam), _floats(args.s)
    routes = ["closed", "ode", "series", "anker"] if args.route == "all" else [args.route]
    if not space.is_h3:
        routes = [r for r in routes if r not in ("closed", "anker")]
        if not routes:
            raise UsageError("closed form and exponential split exist on H3 only")
    rows, agree = [], True
    for lam in lams:
        for s in radii:
            exact = {}
            for route in routes:
                bound = 0.0
                if route == "closed":
                    val = complex(phi_closed_h3(lam, s))
                elif route == "ode":
                    val = complex(phi_ode_table(space, [lam], [s])[0, 0])
                elif route == "series":
                    if s > DEFAULT_R0:
                        continue
                    ev = phi_bessel_series(space, lam, s, args.M)
                    val, bound = ev.value, ev.error_bound
                else:
                    val = phi_anker_h3(lam, s).reconstruct()
                if route != "series":
                    exact[route] = val
                rows.append((lam, s, route, val.real, val.imag, bound))
            vals = list(exact.values())
            agree &= all(abs(v - vals[0]) <= tol for v in vals)
    _calibrate(rec, space)
    rec.csv("specfun.csv", ["lambda", "s", "route", "re", "im", "error_bound"], rows,
            {"space": _space_record(space)})
    rec.check("routes_agree", agree)


def cmd_transform(args, run, rec: RunRecorder):
    space = Space.parse(run["space"])
    tol = run["tol"] or 1e-6
    a = args.gaussian
    if a <= 0:
        raise UsageError("--gaussian must be positive")
    f = RadialProfile.from_function(lambda s: np.exp(-a * s * s), space, 10.0, 40)
    fhat = sft_forward(space, f, lam_max=args.lam_max, panels=int(2 * args.lam_max))
    back = sft_inverse(space, fhat, s_nodes=f.s_grid)
    norm = l2_norm(f, space)
    diff = RadialProfile(f.s_grid, back.values - f.values, space, f.weights)
    rt = l2_norm(diff, space) / norm
    pl = abs(plancherel_norm(space, fhat) - norm) / norm
    _calibrate(rec, space)
    meta = {"space": _space_record(space), "tail_model": fhat.tail_model}
    rec.csv("spectral.csv", ["lambda", "re", "im"],
            ((l, v.real, v.imag) for l, v in zip(fhat.lambda_grid, fhat.values)), meta)
    rec.csv("roundtrip.csv", ["s", "f", "re", "im"],
            ((s, fv.real, b.real, b.imag) for s, fv, b in zip(f.s_grid, f.values, back.values)), meta)
    rec.csv("transform_summary.csv", ["quantity", "value"],
            [("roundtrip_rel_l2", rt), ("plancherel_rel", pl)], meta)
    rec.check("roundtrip", rt <= tol)
    rec.check("plancherel", pl <= tol)


def _curve_and_T(run, annulus):
    curve = parse_curve(run["curve"])
    bound = time_bound(curve, annulus.r1)
    T = run["T"]
    if T is None:
        T = 1.0 if not np.isfinite(bound) else 0.8 * bound
    if not T < bound:
        raise UsageError(f"--T {T} must stay below the admissible bound {bound}")
    return curve, T


def cmd_propagate(args, run, rec: RunRecorder):
    space = Space.parse(run["space"])
    annulus = Annulus.parse(run["annulus"])
    curve, T = _curve_and_T(run, annulus)
    if args.band:
        fhat = band_profile(args.band)
        t_nodes = focus_time_grid(args.band, np.sqrt(args.band), annulus, T, args.t_count)
    else:
        fhat = gaussian_band()
        t_nodes = chebyshev_times(T, args.t_count)
    s_nodes = np.linspace(annulus.r1, annulus.r2, 33)
    sl = propagate_along_curve(PropagationRequest(space, fhat, curve, s_nodes, t_nodes, T))
    meta = {"space": _space_record(space), "curve": curve.describe(), "T": T}
    rec.csv("field.csv", ["s", "t", "re", "im", "abs"], sl.rows(), meta)
    rec.csv("sup.csv", ["s", "sup_t", "argmax_t", "grid_sup"],
            zip(sl.s_nodes, sl.sup_t, sl.argmax_t, sl.grid_sup), meta)
    _calibrate(rec, space)
    bound = pointwise_majorant(space, fhat)
    rec.check("sup_dominates_grid", bool(np.all(sl.sup_t >= np.abs(sl.values).max(axis=1))))
    rec.check("pointwise_majorant", bool(np.all(np.abs(sl.values) <= bound * (1 + 1e-9))))


def cmd_curvecheck(args, run, rec: RunRecorder):
    annulus = Annulus.parse(run["annulus"])
    curve, T = _curve_and_T(run, annulus)
    s = np.linspace(annulus.r1, annulus.r2, 41)
    t = np.linspace(-T, T, 81)
    rep = check_curve_conditions(curve, s, t)
    growth = curve_growth_bounds(curve, annulus, T, t, s)
    rows = [(name, value) for name, value, *_ in rep.rows()]
    rows += [("growth_min_ratio", growth.min_ratio), ("growth_max_ratio", growth.max_ratio),
             ("T", T), ("admissible_T", time_bound(curve, annulus.r1))]
    rec.csv("curvecheck.csv", ["quantity", "value"], rows, {"curve": curve.describe()})
    rec.check("curve_conditions", rep.ok)
    rec.check("growth_bounds", growth.ok)


def _counter_config(cfg: configparser.ConfigParser) -> CounterexampleConfig:
    sec = cfg["counterexample"] if cfg.has_section("counterexample") else {}
    kwargs = {}
    for key in ("c1", "c2", "c3", "c4", "c5", "c6", "M"):
        if key in sec:
            kwargs[key] = float(sec[key])
    if "K" in sec:
        kwargs["K"] = int(sec["K"])
    gamma = sec.get("gamma", "sqrt") if sec else "sqrt"
    if gamma == "sqrt":
        kwargs["gamma_fn"] = np.sqrt
    elif gamma.startswith("power:"):
        p = float(gamma.split(":", 1)[1])
        kwargs["gamma_fn"] = lambda t, p=p: np.abs(t) ** p
    else:
        raise UsageError(f"unknown gamma {gamma!r}; use sqrt or power:p")
    return CounterexampleConfig(**kwargs)


def cmd_counterexample(args, run, rec: RunRecorder, cfg):
    conf = _counter_config(cfg)
    rec.config["counterexample"] = conf.as_dict()
    _calibrate(rec, Space.h3())
    data = build_sequences(conf)
    rec.csv("sequences.csv", ["j", "s", "t", "r", "R"],
            ((j + 1, data.s_seq[j], data.t_seq[j], data.r_seq[j], data.R_seq[j])
             for j in range(data.bands)), conf.as_dict())
    rec.csv("certificates.csv", ["j", "k", "r_sq_dt", "decay_needed", "dt_r", "separation_needed", "ok"],
            ((c.j, c.k, c.r_sq_dt, c.decay_needed, c.dt_r, c.separation_needed, c.ok) for c in data.certificates))
    rep = blowup_report(data)
    rec.csv("blowup_report.csv",
            ["k", "s", "t", "m", "abs_u", "lower_bound", "log_root", "ratio", "diagonal"],
            ((r.k, r.s, r.t, r.m, r.abs_value, r.lower_bound, r.log_root, r.ratio, r.diagonal)
             for r in rep.rows), {"c_min": rep.c_min})
    partial = [h_half_norm_partial(data, J) for J in range(data.bands + 1)]
    scale = envelope_scale(conf)
    env = [scale * band_envelope(r, R) for r, R in zip(data.r_seq, data.R_seq)]
    incr = np.diff(partial)
    rec.csv("hnorm.csv", ["J", "partial", "increment", "band_envelope"],
            ((J, partial[J], incr[J - 1] if J else 0.0, env[J - 1] if J else 0.0)
             for J in range(data.bands + 1)), {"total_envelope": scale * 2 / np.log(3) ** 0.5})
    sel = wide_approach_selector(data, 0.5 * (conf.c1 + conf.c2), 4)
    rec.csv("selector.csv", ["l", "time_index", "point_index"],
            ((l + 1, ti, pi) for l, (ti, pi) in enumerate(zip(sel.time_indices, sel.point_indices))))
    rec.calibration["c_min"] = C_MIN
    rec.check("certificates", all(c.ok for c in data.certificates))
    rec.check("ratios_above_c_min", rep.ratios_ok)
    rec.check("lower_bounds_increasing", rep.increasing)
    rec.check("hnorm_increments_below_envelope", bool(np.all(incr <= np.asarray(env) + 1e-12)))


def cmd_maxest(args, run, rec: RunRecorder):
    space = Space.parse(run["space"])
    annulus = Annulus.parse(run["annulus"])
    curve, T = _curve_and_T(run, annulus)
    N_list = _floats(args.N)
    seed = run["seed"] if run["seed"] else None
    sw = band_sweep(space, curve, annulus, T, N_list, seed=seed)
    _calibrate(rec, space, beta=0.25)
    rec.csv("ratios.csv", ["N", "lhs", "sobolev_norm", "ratio", "refinement_delta"],
            ((N, *row[1:]) for N, row in zip(N_list, sw.report.rows())),
            {"space": _space_record(space), "curve": curve.describe(), "T": T, "slope": sw.slope})
    if args.plot:
        _plot_loglog(rec, "ratios.svg", N_list, sw.report.ratios, "N", "maximal ratio")
    rec.check("slope_within_0.15", sw.within(0.15))


def cmd_converge(args, run, rec: RunRecorder):
    space = Space.parse(run["space"])
    annulus = Annulus.parse(run["annulus"])
    curve, T = _curve_and_T(run, annulus)
    taus = _floats(args.tau)
    if max(taus) > T:
        raise UsageError("every tau must stay below T")
    table = convergence_table(space, gaussian_band(), curve, annulus, taus)
    _calibrate(rec, space)
    rec.csv("convergence.csv", ["tau", "error"], table.rows(),
            {"space": _space_record(space), "curve": curve.describe()})
    if args.plot:
        _plot_loglog(rec, "convergence.svg", taus, table.error, "tau", "e(tau)")
    rec.check("strictly_decreasing", table.strictly_decreasing)


def _plot_loglog(rec: RunRecorder, name, x, y, xlabel, ylabel):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(x, y, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    fig.tight_layout()
    fig.savefig(rec.out / name, metadata={"Date": None})
    plt.close(fig)
    rec.outputs.append(name)


COMMANDS = {"specfun": cmd_specfun, "transform": cmd_transform, "propagate": cmd_propagate,
            "curvecheck": cmd_curvecheck, "counterexample": cmd_counterexample,
            "maxest": cmd_maxest, "converge": cmd_converge}


def _thread_limit(threads: Optional[int]):
    if not threads:
        return nullcontext()
    from threadpoolctl import threadpool_limits
    return threadpool_limits(limits=threads)


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("missing subcommand")
        cfg = _load_config(args.config)
        resolved = _resolve(args, cfg)
        out = output_dir(args.out)
        config = {"command": args.command, **resolved,
                  **{k: v for k, v in vars(args).items()
                     if k not in RUN_KEYS and k not in ("command", "out", "config", "plot")}}
        rec = RunRecorder(out, args.command, config)
        with _thread_limit(resolved["threads"]):
            if args.command == "counterexample":
                cmd_counterexample(args, resolved, rec, cfg)
            else:
                COMMANDS[args.command](args, resolved, rec)
    except UsageError as exc:
        print(f"hypwave: {exc}", file=sys.stderr)
        parser.print_help(sys.stderr)
        return EXIT_USAGE
    except (HypwaveError, ValueError, configparser.Error) as exc:
        print(f"hypwave: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest = rec.finish()
    for name, ok in manifest["assertions"].items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return EXIT_OK if manifest["passed"] else EXIT_ASSERT


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
