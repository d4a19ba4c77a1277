"""Command-line surface: pilot planning, simulation, and table reproduction.

Subcommands
-----------
plan-variance   pilot size so the estimated SD rarely misleads the main study
plan-effect     pilot size so the estimated effect rarely misleads it
simulate        Monte Carlo check of either pipeline at a given pilot size
tables          recompute a full reference grid (sizes + simulated underpower)

Exit codes: 0 success, 1 computational failure (including unsatisfiable
plans), 2 usage error.  Probabilities are decimals (0.2, not 20).
"""

from __future__ import annotations

import argparse
import io
import json
import sys
import csv as _csv

from .distributions import ConvergenceError
from .power import (
    EffectSpec,
    ONE_SAMPLE,
    TWO_SAMPLE,
    T_ITERATIVE,
    Z_APPROX,
    TestDesign,
    arcsine_effect,
)
from .variance import APPROX, EXACT, PowerBounds, plan_variance_pilot
from .effect import plan_effect_pilot
from .simulation import (
    ConfigError,
    SimulationConfig,
    reproduce_table,
    simulate_effect_pipeline,
    simulate_variance_pipeline,
)

_FORMATS = ("table", "csv", "json")
_DESIGNS = {"one": ONE_SAMPLE, "two": TWO_SAMPLE}


def _probability(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v > 1.0:
        raise argparse.ArgumentTypeError(
            f"{text} looks like a percentage; give a decimal instead (e.g. {v / 100:g})")
    if not (0.0 < v < 1.0):
        raise argparse.ArgumentTypeError(f"must be strictly between 0 and 1, got {text}")
    return v


def _proportion(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if v > 1.0:
        raise argparse.ArgumentTypeError(
            f"{text} looks like a percentage; give a decimal instead (e.g. {v / 100:g})")
    if not (0.0 <= v <= 1.0):
        raise argparse.ArgumentTypeError(f"must be between 0 and 1, got {text}")
    return v


def _positive(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not v > 0.0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return v


def _add_common_plan_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--alpha", type=_probability, default=0.05,
                     help="two-sided type I error of the main study (default 0.05)")
    sub.add_argument("--power", type=_probability, default=0.8,
                     help="target power of the main study (default 0.8)")
    sub.add_argument("--underpower-prob", type=_probability, required=True,
                     help="allowed chance of landing below the power threshold")
    sub.add_argument("--underpower-threshold", type=_probability, required=True,
                     help="power level counted as underpowered (e.g. 0.6)")
    sub.add_argument("--overpower-prob", type=_probability,
                     help="allowed chance of landing above the overpower threshold")
    sub.add_argument("--overpower-threshold", type=_probability,
                     help="power level counted as overpowered (e.g. 0.9)")
    sub.add_argument("--design", choices=sorted(_DESIGNS), default="two",
                     help="one- or two-sample main study (default two)")
    sub.add_argument("--format", choices=_FORMATS, default="table",
                     help="output format (default table)")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilotplan",
        description="Pilot-study sample sizes that bound the chance of an "
                    "under- or over-powered main study.")
    subs = parser.add_subparsers(dest="command", required=True)

    pv = subs.add_parser("plan-variance",
                         help="pilot size for a reliable SD estimate")
    pv.add_argument("--sigma", type=_positive, required=True,
                    help="outcome SD from prior knowledge")
    pv.add_argument("--delta", type=_positive, required=True,
                    help="practically meaningful effect")
    pv.add_argument("--mode", choices=(EXACT, APPROX), default=APPROX,
                    help="pilot-size rule: exact chi-square search or the "
                         "closed-form approximation (default approx)")
    pv.add_argument("--pooled-pilot", action="store_true",
                    help="pilot variance pooled over two groups of the given size")
    _add_common_plan_flags(pv)

    pe = subs.add_parser("plan-effect",
                         help="pilot size for a reliable effect estimate")
    pe.add_argument("--mu0", type=_positive, help="study effect from prior knowledge")
    pe.add_argument("--sigma", type=_positive, help="known outcome SD")
    pe.add_argument("--p1", type=_proportion,
                    help="baseline proportion (arcsine effect entry)")
    pe.add_argument("--p2", type=_proportion,
                    help="treated proportion (arcsine effect entry)")
    _add_common_plan_flags(pe)

    sim = subs.add_parser("simulate", help="Monte Carlo check of a pipeline")
    sim.add_argument("--scenario", choices=("variance", "effect"), required=True)
    sim.add_argument("--effect", "--delta", dest="effect", type=_positive, required=True,
                     help="true effect (delta for the variance scenario, "
                          "prior effect for the effect scenario)")
    sim.add_argument("--sigma", type=_positive, default=1.0,
                     help="true outcome SD (default 1)")
    sim.add_argument("--pilot-n", type=int, required=True,
                     help="pilot size per group")
    sim.add_argument("--seed", type=int, required=True,
                     help="RNG seed (results are reproducible from it)")
    sim.add_argument("--reps", type=int, default=1000,
                     help="number of replicates (default 1000)")
    sim.add_argument("--alpha", type=_probability, default=0.05)
    sim.add_argument("--power", type=_probability, default=0.8)
    sim.add_argument("--underpower-threshold", type=_probability, default=0.6)
    sim.add_argument("--design", choices=sorted(_DESIGNS), default="two")
    sim.add_argument("--sizing-mode", choices=(Z_APPROX, T_ITERATIVE),
                     default=T_ITERATIVE,
                     help="how the simulated analyst sizes the main study")
    sim.add_argument("--estimator", choices=("pooled-sd", "known-sigma"),
                     default="pooled-sd",
                     help="effect scenario: divide by the pooled SD or the known sigma")
    sim.add_argument("--pooled-pilot", action="store_true",
                     help="variance scenario: pool two pilot groups")
    sim.add_argument("--format", choices=_FORMATS, default="table")

    tab = subs.add_parser("tables", help="recompute a reference grid")
    tab.add_argument("--id", type=int, choices=(1, 2), required=True,
                     help="1 = variability grid, 2 = effect-size grid")
    tab.add_argument("--reps", type=int, default=1000)
    tab.add_argument("--seed", type=int, required=True)
    tab.add_argument("--format", choices=_FORMATS, default="table")
    return parser


def _bounds_from(args: argparse.Namespace) -> PowerBounds:
    return PowerBounds(
        underpower_prob=args.underpower_prob,
        underpower_threshold=args.underpower_threshold,
        overpower_prob=args.overpower_prob,
        overpower_threshold=args.overpower_threshold,
    )


def _print_plan(plan, fmt: str, human_lines: list[str]) -> None:
    if fmt == "json":
        print(json.dumps({"config": plan.config_dict(),
                          "results": plan.results_dict()},
                         indent=2, sort_keys=True))
    elif fmt == "csv":
        record = plan.to_dict()
        buf = io.StringIO()
        writer = _csv.DictWriter(buf, fieldnames=list(record))
        writer.writeheader()
        writer.writerow(record)
        print(buf.getvalue(), end="")
    else:
        print("\n".join(human_lines))


def _pct(x: float) -> str:
    return f"{100.0 * x:g}%"


def _cmd_plan_variance(args: argparse.Namespace) -> int:
    design = TestDesign(_DESIGNS[args.design], args.alpha)
    plan = plan_variance_pilot(EffectSpec(args.delta, args.sigma), design,
                               args.power, _bounds_from(args),
                               mode=args.mode, pooled_pilot=args.pooled_pilot)
    lines = [
        f"variance-driven pilot plan ({plan.kind}, alpha={plan.alpha:g}, "
        f"target power {_pct(plan.power_target)})",
        f"  effect {plan.delta:g}, prior sd {plan.sigma:g}",
        f"  goal: < {_pct(plan.underpower_prob)} chance of true power below "
        f"{_pct(plan.underpower_threshold)}",
        f"  main-study N per group at {_pct(plan.underpower_threshold)} power: "
        f"{plan.main_n_under}",
        f"  sd at which the {_pct(plan.power_target)}-power design is adequate: "
        f"{plan.sigma_under:.4g}",
        f"  pilot N for the underpower bound ({plan.mode}): {plan.pilot_n_under}",
    ]
    if plan.main_n_over is not None:
        lines += [
            f"  goal: < {_pct(plan.overpower_prob)} chance of true power above "
            f"{_pct(plan.overpower_threshold)}",
            f"  main-study N per group at {_pct(plan.overpower_threshold)} power: "
            f"{plan.main_n_over}",
            f"  sd at which the {_pct(plan.power_target)}-power design is adequate: "
            f"{plan.sigma_over:.4g}",
            f"  pilot N for the overpower bound ({plan.mode}): {plan.pilot_n_over}",
        ]
    lines.append(f"  pilot sample size: {plan.pilot_n}")
    _print_plan(plan, args.format, lines)
    return 0


def _cmd_plan_effect(args: argparse.Namespace) -> int:
    by_effect = args.mu0 is not None or args.sigma is not None
    by_props = args.p1 is not None or args.p2 is not None
    if by_effect == by_props:
        print("error: give either --mu0 with --sigma, or --p1 with --p2",
              file=sys.stderr)
        return 2
    if by_effect:
        if args.mu0 is None or args.sigma is None:
            print("error: --mu0 and --sigma go together", file=sys.stderr)
            return 2
        mu0, sigma = args.mu0, args.sigma
        entry = f"effect {mu0:g}, known sd {sigma:g} (effect size {mu0 / sigma:g})"
    else:
        if args.p1 is None or args.p2 is None:
            print("error: --p1 and --p2 go together", file=sys.stderr)
            return 2
        spec = arcsine_effect(args.p1, args.p2)
        mu0, sigma = spec.effect, spec.sigma
        entry = (f"proportions {args.p1:g} vs {args.p2:g} -> arcsine effect size "
                 f"{mu0:.4f} (sd 1)")
    design = TestDesign(_DESIGNS[args.design], args.alpha)
    plan = plan_effect_pilot(mu0, sigma, design, args.power, _bounds_from(args))
    lines = [
        f"effect-driven pilot plan ({plan.kind}, alpha={plan.alpha:g}, "
        f"target power {_pct(plan.power_target)})",
        f"  {entry}",
        f"  goal: < {_pct(plan.underpower_prob)} chance of true power below "
        f"{_pct(plan.underpower_threshold)}",
        f"  main-study N per group at {_pct(plan.underpower_threshold)} power: "
        f"{plan.main_n_under}",
        f"  effect at which the {_pct(plan.power_target)}-power design is adequate: "
        f"{plan.mu_under:.4g} (effect size {plan.mu_under / plan.sigma:.4g})",
        f"  pilot N per group for the underpower bound: {plan.pilot_n_under}",
    ]
    if plan.main_n_over is not None:
        lines += [
            f"  goal: < {_pct(plan.overpower_prob)} chance of true power above "
            f"{_pct(plan.overpower_threshold)}",
            f"  main-study N per group at {_pct(plan.overpower_threshold)} power: "
            f"{plan.main_n_over}",
            f"  effect at which the {_pct(plan.power_target)}-power design is adequate: "
            f"{plan.mu_over:.4g}",
            f"  pilot N per group for the overpower bound: {plan.pilot_n_over}",
        ]
    lines.append(f"  pilot sample size per group: {plan.pilot_n}")
    _print_plan(plan, args.format, lines)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    cfg = SimulationConfig(
        scenario=args.scenario, effect=args.effect, sigma=args.sigma,
        pilot_n=args.pilot_n, seed=args.seed, replicates=args.reps,
        kind=_DESIGNS[args.design], alpha=args.alpha,
        power_target=args.power, underpower_threshold=args.underpower_threshold,
        pooled_pilot=args.pooled_pilot, sizing_mode=args.sizing_mode,
        estimator=args.estimator)
    run = (simulate_variance_pipeline if args.scenario == "variance"
           else simulate_effect_pipeline)
    rep = run(cfg)
    if args.format == "json":
        print(rep.to_json())
    elif args.format == "csv":
        print(rep.to_csv(), end="")
    else:
        lines = [
            f"simulated {rep.scenario} pipeline: {rep.replicates} replicates, "
            f"seed {rep.seed}",
            f"  empirical underpower: {rep.empirical_underpower:.4f} "
            f"(MC se {rep.mc_standard_error:.4f})",
            f"  main-study N percentiles (5/25/50/75/95): "
            + "/".join(str(v) for v in rep.main_n_quantiles.values()),
        ]
        if rep.scenario == "effect":
            lines.append(f"  nonpositive effect estimates: {rep.nonpositive_effects}")
        print("\n".join(lines))
    return 0


def _cmd_tables(args: argparse.Namespace) -> int:
    report = reproduce_table(args.id, replicates=args.reps, seed=args.seed)
    if args.format == "json":
        print(report.to_json())
    elif args.format == "csv":
        print(report.to_csv(), end="")
    else:
        print(report.format_text(), end="")
    return 0


_HANDLERS = {
    "plan-variance": _cmd_plan_variance,
    "plan-effect": _cmd_plan_effect,
    "simulate": _cmd_simulate,
    "tables": _cmd_tables,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (ValueError, ConfigError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
