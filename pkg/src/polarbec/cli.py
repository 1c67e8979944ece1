"""Command-line front-end for the construction and analysis pipeline.

Every subcommand resolves its configuration as flags > --config JSON file >
built-in defaults, echoes the resolved config in the report, and writes the
report as JSON to stdout or --output.  Side files (CSV curves, code files)
go wherever their flags point.  Exit codes: 0 success, 2 bad usage or
parameters, 3 feasible-looking parameters with no feasible result, 4 internal
inconsistency.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys

import numpy as np

from . import criterion, frontier
from .codec import simulate, wilson_interval
from .construction import (
    _round_nearest,
    construct_multipocket,
    load_codespec,
    pocket_weights,
    save_codespec,
    select_classical,
    union_bound,
)
from .erasure import RootChannel, cached_level_table
from .errors import (
    DegenerateFitError,
    EmptyCodeError,
    InfeasibleTargetError,
    InvalidCandidateError,
    LevelTooLargeError,
    PolarBECError,
)

CACHE_ENV = "POLARBEC_CACHE_DIR"

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_INTERNAL = 4

DEFAULTS: dict[str, dict] = {
    "criterion": {
        "alpha": 0.64,
        "h_table": None,
        "grid": 4096,
        "ratio_csv": None,
    },
    "mu-estimate": {
        "a": 0.01,
        "b": 0.99,
        "steps": 30,
        "grid": 8192,
        "z0": 0.5,
        "fit_fraction": 0.5,
        "iterates_csv": None,
    },
    "construct": {
        "mode": "multipocket",
        "n": 16,
        "z0": 0.5,
        "beta_p": 0.30,
        "mu_p": 8.0,
        "mu_star": 3.8,
        "pockets": 8,
        "p_ub": 2.0 ** -10,
        "levels": None,
        "level_fractions": None,
        "rate": None,
        "budget": None,
        "code_out": None,
    },
    "frontier": {
        "mu_star": 3.627,
        "samples": 53,
        "csv": None,
    },
    "simulate": {
        "code": None,
        "z0": None,
        "trials": 10_000,
        "seed": 0,
        "batch": 4096,
        "csv": None,
    },
    "corollaries": {
        "mu_star": 3.627,
        "beta_star": 0.4469,
        "grid": 10_000,
        "gammas": "0.30,0.50,0.70,0.90,0.99",
    },
}


def _float_list(text: str) -> list[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    if not parts:
        raise ValueError("expected a comma-separated list of numbers")
    return [float(p) for p in parts]


def _int_list(text: str) -> list[int]:
    return [int(round(v)) for v in _float_list(text)]


def resolve_config(sub: str, args: argparse.Namespace) -> dict:
    """Merge defaults, the optional config file, and explicit flags."""
    merged = dict(DEFAULTS[sub])
    if args.config is not None:
        with open(args.config) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("--config must hold a JSON object")
        unknown = sorted(set(loaded) - set(merged))
        if unknown:
            raise ValueError(f"unknown config keys for {sub}: {', '.join(unknown)}")
        merged.update(loaded)
    for key in merged:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            merged[key] = flag_value
    return merged


def _write_json(report: dict, output: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if output is None:
        sys.stdout.write(text)
    else:
        with open(output, "w") as fh:
            fh.write(text)


def _write_csv(path: str, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def cmd_criterion(config: dict) -> dict:
    if config["h_table"] is not None:
        table = np.loadtxt(config["h_table"], delimiter=",", ndmin=2)
        if table.shape[1] != 2:
            raise ValueError("h table must have two columns: xi,value")
        h = criterion.CandidateH.tabulated(
            criterion.GridFunction(table[:, 0], table[:, 1])
        )
    else:
        alpha = config["alpha"]
        if not 0.0 < alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
        h = criterion.CandidateH.power(alpha)
    result = criterion.sup_ratio(h, grid_size=config["grid"])
    polarizes = result.ratio < 1.0
    above_2 = polarizes and result.ratio > 2.0 ** -0.5
    mu_star = criterion.mu_star_from_ratio(result.ratio) if above_2 else None
    if config["ratio_csv"] is not None:
        xs, ratios = criterion.ratio_curve(h, config["grid"])
        _write_csv(
            config["ratio_csv"],
            ["xi", "ratio"],
            zip(xs.tolist(), ratios.tolist()),
        )
    return {
        "sup_ratio": result.ratio,
        "argmax": result.argmax,
        "left_limit": result.left_limit,
        "right_limit": result.right_limit,
        "polarizes": polarizes,
        "mu_star": mu_star,
        "mu_star_above_2": above_2,
    }


def cmd_mu_estimate(config: dict) -> dict:
    iterates = criterion.iterate_g(
        config["a"], config["b"], config["steps"], grid_size=config["grid"]
    )
    mu = criterion.estimate_mu(iterates, config["z0"], config["fit_fraction"])
    values = [float(g(config["z0"])) for g in iterates]
    if config["iterates_csv"] is not None:
        _write_csv(
            config["iterates_csv"],
            ["step", "g_z0"],
            list(enumerate(values)),
        )
    return {
        "mu": mu,
        "steps": config["steps"],
        "g_final_z0": values[-1],
    }


def _feasibility_hint(beta_p: float, mu_p: float, mu_star: float) -> str:
    try:
        cap = frontier.max_beta(mu_p, mu_star)
    except (ValueError, PolarBECError):
        return "no feasible beta_p at these exponents"
    return (
        f"largest achievable beta_p at mu_p={mu_p:g}, mu_star={mu_star:g}"
        f" is about {cap:.4f} (requested {beta_p:g})"
    )


def cmd_construct(config: dict) -> dict:
    root = RootChannel(config["z0"])
    n = int(config["n"])
    cache_dir = os.environ.get(CACHE_ENV)
    if config["mode"] == "classical":
        if config["rate"] is None and config["budget"] is None:
            raise ValueError("classical mode needs --rate or --budget")
        table = cached_level_table(root, n, cache_dir) if cache_dir else None
        spec = select_classical(
            root,
            n,
            rate=config["rate"],
            max_sum_erasure=config["budget"],
            table=table,
        )
        report = {
            "size": len(spec),
            "rate": spec.rate,
            "capacity": root.capacity,
            "gap": root.capacity - spec.rate,
            "union_bound_log": union_bound(spec),
            "pockets": [],
        }
    elif config["mode"] == "multipocket":
        levels = config["levels"]
        if levels is None and config["level_fractions"] is not None:
            rounded = [_round_nearest(f * n) for f in config["level_fractions"]]
            levels = sorted(set(rounded))
        try:
            spec, cons = construct_multipocket(
                root,
                n,
                config["beta_p"],
                config["mu_p"],
                config["mu_star"],
                pockets=int(config["pockets"]),
                p_ub=config["p_ub"],
                levels=levels,
            )
        except EmptyCodeError as err:
            hint = _feasibility_hint(
                config["beta_p"], config["mu_p"], config["mu_star"]
            )
            raise EmptyCodeError(f"{err} ({hint})") from err
        report = {
            "size": len(spec),
            "rate": cons.rate,
            "capacity": cons.capacity,
            "gap": cons.gap,
            "union_bound_log": cons.union_bound_log,
            "n0": cons.n0,
            "quota": cons.quota,
            "pockets": [
                {
                    "level": level,
                    "recruited": recruited,
                    "retained": retained,
                    "lost_fraction": lost,
                }
                for level, recruited, retained, lost in pocket_weights(cons)
            ],
        }
    else:
        raise ValueError(f"unknown mode {config['mode']!r}")
    if config["code_out"] is not None:
        save_codespec(spec, config["code_out"])
        report["code_file"] = config["code_out"]
    return report


def cmd_frontier(config: dict) -> dict:
    mu_star = config["mu_star"]
    points = frontier.trace_frontier(mu_star, samples=int(config["samples"]))
    rows = [(p.beta_p, p.inv_mu_p) for p in points]
    if config["csv"] is not None:
        detailed = []
        for beta_p, inv in rows:
            mu_p = 1.0 / inv if inv > 0.0 else frontier.INFINITE_MU
            res = frontier.is_achievable(
                frontier.RegionQuery(beta_p, mu_p, mu_star)
            )
            detailed.append((inv, beta_p, res.worst_pi, res.worst_margin))
        _write_csv(
            config["csv"],
            ["inv_mu_p", "beta_p", "worst_pi", "margin"],
            detailed,
        )
    return {
        "points": [list(r) for r in rows],
        "top_inv_mu": rows[0][1],
        "intercept_estimate": rows[-1][0],
    }


def cmd_simulate(config: dict) -> dict:
    if config["code"] is None:
        raise ValueError("simulate needs --code pointing at a code file")
    spec = load_codespec(config["code"])
    z0 = spec.z0 if config["z0"] is None else config["z0"]
    root = RootChannel(z0)
    result = simulate(
        spec,
        root,
        int(config["trials"]),
        int(config["seed"]),
        batch=int(config["batch"]),
    )
    if config["csv"] is not None:
        rows = []
        for block, (errors, trials) in enumerate(result.batches):
            lo, hi = wilson_interval(errors, trials)
            rows.append((block, errors, trials, errors / trials, lo, hi))
        _write_csv(
            config["csv"],
            ["trial_block", "errors", "trials", "estimate", "ci_lo", "ci_hi"],
            rows,
        )
    lo, hi = result.wilson_ci95
    return {
        "trials": result.trials,
        "block_errors": result.block_errors,
        "estimate": result.estimate,
        "wilson_ci95": [lo, hi],
        "z0": z0,
        "code_n": spec.n,
        "code_size": len(spec),
    }


def cmd_corollaries(config: dict) -> dict:
    gammas = config["gammas"]
    if isinstance(gammas, str):
        gammas = _float_list(gammas)
    report = frontier.verify_corollaries(
        mu_star=config["mu_star"],
        grid=int(config["grid"]),
        beta_star=config["beta_star"],
        gammas=tuple(gammas),
    )
    return report.as_dict()


HANDLERS = {
    "criterion": cmd_criterion,
    "mu-estimate": cmd_mu_estimate,
    "construct": cmd_construct,
    "frontier": cmd_frontier,
    "simulate": cmd_simulate,
    "corollaries": cmd_corollaries,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polarbec",
        description="Polar-code construction and analysis on the binary erasure channel.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        sp = subs.add_parser(name, help=help_text)
        sp.add_argument("--config", help="JSON file with defaults for this subcommand")
        sp.add_argument("--output", help="write the JSON report here instead of stdout")
        return sp

    d = DEFAULTS["criterion"]
    sp = add("criterion", "sup-ratio check for a candidate h and the implied mu*")
    sp.add_argument("--alpha", type=float, help=f"power-family exponent (default {d['alpha']})")
    sp.add_argument("--h-table", dest="h_table", help="CSV xi,value table for a custom candidate")
    sp.add_argument("--grid", type=int, help=f"ratio grid size (default {d['grid']})")
    sp.add_argument("--ratio-csv", dest="ratio_csv", help="write the sampled ratio curve here")

    d = DEFAULTS["mu-estimate"]
    sp = add("mu-estimate", "estimate mu from the functional iteration")
    sp.add_argument("--a", type=float, help=f"indicator left edge (default {d['a']})")
    sp.add_argument("--b", type=float, help=f"indicator right edge (default {d['b']})")
    sp.add_argument("--steps", type=int, help=f"iteration count (default {d['steps']})")
    sp.add_argument("--grid", type=int, help=f"grid size (default {d['grid']})")
    sp.add_argument("--z0", type=float, help=f"evaluation point (default {d['z0']})")
    sp.add_argument(
        "--fit-fraction",
        dest="fit_fraction",
        type=float,
        help=f"trailing fraction of iterates used in the fit (default {d['fit_fraction']})",
    )
    sp.add_argument("--iterates-csv", dest="iterates_csv", help="write step,g_z0 samples here")

    d = DEFAULTS["construct"]
    sp = add("construct", "build a code and report rate, gap, and pocket stats")
    sp.add_argument("--mode", choices=["multipocket", "classical"], help=f"(default {d['mode']})")
    sp.add_argument("--n", type=int, help=f"level, block length 2**n (default {d['n']})")
    sp.add_argument("--z0", type=float, help=f"channel erasure rate (default {d['z0']})")
    sp.add_argument("--beta-p", dest="beta_p", type=float, help=f"target error exponent (default {d['beta_p']})")
    sp.add_argument("--mu-p", dest="mu_p", type=float, help=f"target gap exponent (default {d['mu_p']})")
    sp.add_argument("--mu-star", dest="mu_star", type=float, help=f"criterion exponent (default {d['mu_star']})")
    sp.add_argument("--pockets", type=int, help=f"pocket count D (default {d['pockets']})")
    sp.add_argument("--p-ub", dest="p_ub", type=float, help=f"recruit tail budget (default 2**-10)")
    sp.add_argument("--levels", type=_int_list, help="explicit pocket levels, e.g. 2,4,6,8")
    sp.add_argument(
        "--level-fractions",
        dest="level_fractions",
        type=_float_list,
        help="pocket levels as fractions of n, e.g. 0.7,0.9",
    )
    sp.add_argument("--rate", type=float, help="classical mode: target rate")
    sp.add_argument("--budget", type=float, help="classical mode: union-bound budget")
    sp.add_argument("--code-out", dest="code_out", help="write the selected channel file here")

    d = DEFAULTS["frontier"]
    sp = add("frontier", "trace the achievable (beta', 1/mu') boundary")
    sp.add_argument("--mu-star", dest="mu_star", type=float, help=f"(default {d['mu_star']})")
    sp.add_argument("--samples", type=int, help=f"(default {d['samples']})")
    sp.add_argument("--csv", help="write beta_p,inv_mu_p rows here")

    d = DEFAULTS["simulate"]
    sp = add("simulate", "Monte-Carlo block error rate for a stored code")
    sp.add_argument("--code", help="code file produced by construct")
    sp.add_argument("--z0", type=float, help="override the stored channel erasure rate")
    sp.add_argument("--trials", type=int, help=f"(default {d['trials']})")
    sp.add_argument("--seed", type=int, help=f"(default {d['seed']})")
    sp.add_argument("--batch", type=int, help=f"trials per tally row (default {d['batch']})")
    sp.add_argument("--csv", help="write per-batch tallies here")

    d = DEFAULTS["corollaries"]
    sp = add("corollaries", "numeric checks tying the region to its reference points")
    sp.add_argument("--mu-star", dest="mu_star", type=float, help=f"(default {d['mu_star']})")
    sp.add_argument("--beta-star", dest="beta_star", type=float, help=f"(default {d['beta_star']})")
    sp.add_argument("--grid", type=int, help=f"(default {d['grid']})")
    sp.add_argument("--gammas", help=f"comma-separated sweep (default {d['gammas']})")

    return parser


def _fail(exc: Exception, code: int) -> int:
    payload = {
        "error": type(exc).__name__,
        "message": str(exc),
        "exit_code": code,
    }
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def entrypoint(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = args.subcommand
    try:
        config = resolve_config(sub, args)
        body = HANDLERS[sub](config)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        return _fail(exc, EXIT_USAGE)
    except (InvalidCandidateError, LevelTooLargeError) as exc:
        return _fail(exc, EXIT_USAGE)
    except (InfeasibleTargetError, EmptyCodeError, DegenerateFitError) as exc:
        return _fail(exc, EXIT_INFEASIBLE)
    except PolarBECError as exc:
        return _fail(exc, EXIT_INTERNAL)
    except Exception as exc:  # noqa: BLE001 - last-resort mapping to exit 4
        return _fail(exc, EXIT_INTERNAL)
    report = {"config": {"subcommand": sub, **config}}
    report.update(body)
    _write_json(report, getattr(args, "output", None))
    return EXIT_OK


def main() -> None:
    sys.exit(entrypoint())


if __name__ == "__main__":
    main()
