"""Command-line interface.

Subcommands: expect, gn-trace, strong-approx, weak-approx, verify-strong,
verify-weak, game.  Scenarios are file paths or built-in names.  Every
command prints a text report (or the machine-readable JSON with
--report machine) and, when --report-dir is given, writes both side by
side.  Reports contain no timestamps: identical inputs produce byte-
identical machine reports.

Exit codes: 0 success / declared threshold met, 1 certification or
threshold failure, 2 usage and validation errors.
"""

from __future__ import annotations

import argparse
import itertools
import json
import re
import sys
from fractions import Fraction
from pathlib import Path

from .engine import expect
from .errors import ProdexError, ScenarioError
from .functions import DEFAULT_HORIZON, Cylinder
from .games import (
    FinitisticProfile,
    best_response_value,
    naming_game_exploit,
    naming_game_value,
    purify,
)
from .harness import verify_strong, verify_weak
from .martingale import find_strong_approx, trace
from .model import HybridMeasure, LazyPoint, MeasureAssignment
from .numeric import F0, F1, Interval
from .scenario import BUILTIN_SCENARIOS, Scenario, load_scenario
from .seeds import derive_seed
from .tailclass import weak_zero_from_sample

REPORT_SCHEMA_VERSION = 1


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def _interval_payload(iv: Interval) -> dict:
    return {"lo": float(iv.lo), "hi": float(iv.hi), "width": float(iv.width)}


def _payload(command: str, scenario: Scenario, params: dict, result: dict) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "scenario": scenario.name,
        "scenario_digest": scenario.digest,
        "params": params,
        "result": result,
    }


def _default(args, scenario: Scenario, key: str, fallback):
    cli_value = getattr(args, key, None)
    if cli_value is not None:
        return cli_value
    value = scenario.defaults.get(key.replace("_", "-"),
                                  scenario.defaults.get(key))
    if value is None:
        return fallback
    return int(value) if isinstance(fallback, int) else value


def _resolve_point(args, scenario: Scenario):
    name = args.point
    if name == "lazy":
        return LazyPoint(derive_seed(args.seed, "cli-point"), scenario.measure), name
    return scenario.point(name), name


def _need_function(scenario: Scenario):
    if scenario.function is None:
        raise ScenarioError("scenario declares no function", scenario.source)
    return scenario.function


# ---------------------------------------------------------------------------
# command handlers: each returns (exit_code, text_lines, payload)
# ---------------------------------------------------------------------------

def _cmd_expect(args, scenario: Scenario):
    f = _need_function(scenario)
    res = expect(f, scenario.measure, args.tol, node_budget=args.node_budget,
                 horizon=args.horizon)
    lines = [
        f"expectation of {f.family} under {scenario.name}",
        f"  interval  [{float(res.interval.lo)!r}, {float(res.interval.hi)!r}]",
        f"  width     {float(res.width)!r}",
        f"  status    {res.status}",
        f"  nodes     {res.nodes_expanded}",
    ]
    if res.eta > 0:
        lines.append(f"  eta       {float(res.eta)!r}")
    result = {
        "lo": float(res.interval.lo),
        "hi": float(res.interval.hi),
        "lo_rational": _frac_str(res.interval.lo),
        "hi_rational": _frac_str(res.interval.hi),
        "status": res.status,
        "nodes_expanded": res.nodes_expanded,
        "eta": float(res.eta),
        "oracle_used": res.oracle_used,
    }
    params = {"tol": float(Fraction(args.tol)), "node_budget": args.node_budget}
    return (0 if res.certified else 1), lines, _payload(
        "expect", scenario, params, result)


def _cmd_gn_trace(args, scenario: Scenario):
    f = _need_function(scenario)
    point, point_name = _resolve_point(args, scenario)
    n_max = _default(args, scenario, "n_max", 8)
    tr = trace(f, scenario.measure, point, n_max, args.tol,
               node_budget=args.node_budget, horizon=args.horizon)
    lines = [f"g_n trace at point {point_name} ({scenario.name})",
             "# n  g_n"]
    entries = []
    for e in tr.entries:
        lines.append(f"{e.n}  {float(e.interval.midpoint)!r}")
        entries.append({
            "n": e.n,
            "lo": float(e.interval.lo),
            "hi": float(e.interval.hi),
            "eta": float(e.eta),
        })
    ref = tr.reference.interval
    lines.append(f"# reference E[f] = {float(ref.midpoint)!r} "
                 f"(width {float(ref.width)!r})")
    result = {"entries": entries, "reference": _interval_payload(ref)}
    params = {"point": point_name, "n_max": n_max, "tol": float(Fraction(args.tol))}
    return 0, lines, _payload("gn-trace", scenario, params, result)


def _cmd_strong_approx(args, scenario: Scenario):
    f = _need_function(scenario)
    point, point_name = _resolve_point(args, scenario)
    epsilon = _default(args, scenario, "epsilon", 0.01)
    n_max = _default(args, scenario, "n_max", 32)
    res = find_strong_approx(f, scenario.measure, point, epsilon, n_max,
                             args.tol, node_budget=args.node_budget,
                             horizon=args.horizon)
    lines = [f"strong approximation search at point {point_name} "
             f"(epsilon={float(Fraction(epsilon))}, n_max={n_max})"]
    if res.is_found:
        lines.append(f"  Found({res.n})")
        lines.append(f"  g_n in [{float(res.found_value.lo)!r}, "
                     f"{float(res.found_value.hi)!r}]")
    elif res.outcome == "not_found":
        lines.append(f"  NotFoundUpTo({n_max})")
    else:
        lines.append(f"  Inconclusive(undecided n: {list(res.undecided)})")
    if res.eta > 0:
        lines.append(f"  eta {float(res.eta)!r}")
    result = {
        "outcome": res.outcome,
        "n": res.n,
        "undecided": list(res.undecided),
        "first_certified": res.first_certified,
        "eta": float(res.eta),
    }
    params = {"point": point_name, "epsilon": float(Fraction(epsilon)),
              "n_max": n_max, "tol": float(Fraction(args.tol))}
    return (0 if res.is_found else 1), lines, _payload(
        "strong-approx", scenario, params, result)


def _cmd_weak_approx(args, scenario: Scenario):
    f = _need_function(scenario)
    depth = _default(args, scenario, "depth", 2)
    horizon = args.horizon if args.horizon is not None else DEFAULT_HORIZON
    reference = None if args.r is None else Fraction(args.r)
    cert = weak_zero_from_sample(
        f, scenario.measure, args.tol, depth, args.seed,
        retries=args.retries, horizon=horizon,
        node_budget=args.node_budget, reference=reference)
    lines = [
        f"weak 0-approximation certificate ({scenario.name}, depth {depth})",
        f"  coordinate   {cert.coordinate}",
        f"  alpha        {_frac_str(cert.alpha)} = {float(cert.alpha)!r}",
        f"  mixes        {cert.symbol_low!r} (alpha) with {cert.symbol_high!r}",
        f"  achieved     {float(cert.achieved)!r}",
    ]
    if cert.eta > 0:
        lines.append(f"  eta          {float(cert.eta)!r}")
    result = {
        "coordinate": cert.coordinate,
        "alpha": float(cert.alpha),
        "alpha_rational": _frac_str(cert.alpha),
        "symbol_low": cert.symbol_low,
        "symbol_high": cert.symbol_high,
        "achieved": float(cert.achieved),
        "achieved_rational": _frac_str(cert.achieved),
        "value_low": float(cert.value_low),
        "value_high": float(cert.value_high),
        "eta": float(cert.eta),
    }
    params = {"depth": depth, "seed": args.seed, "retries": args.retries,
              "r": None if args.r is None else float(Fraction(args.r))}
    return 0, lines, _payload("weak-approx", scenario, params, result)


def _verification_payload(report, threshold):
    return {
        "samples": report.samples,
        "certified": report.certified,
        "inconclusive": report.inconclusive,
        "failed": report.failed,
        "certified_fraction": float(report.certified_fraction),
        "inconclusive_fraction": float(report.inconclusive_fraction),
        "max_eta": float(report.max_eta),
        "threshold": None if threshold is None else float(threshold),
        "records": [
            {"index": r.index, "substream": r.substream, "outcome": r.outcome,
             "detail": r.detail, "eta": float(r.eta)}
            for r in report.records
        ],
    }


def _verification_lines(title, report, threshold, met):
    lines = [
        title,
        f"  samples              {report.samples}",
        f"  certified_fraction   {float(report.certified_fraction)!r}"
        f"  ({report.certified}/{report.samples})",
        f"  inconclusive         {report.inconclusive}",
        f"  failed               {report.failed}",
        f"  max eta              {float(report.max_eta)!r}",
    ]
    if threshold is not None:
        lines.append(f"  threshold            {float(threshold)!r} "
                     f"-> {'met' if met else 'MISSED'}")
    return lines


def _cmd_verify_strong(args, scenario: Scenario):
    f = _need_function(scenario)
    epsilon = _default(args, scenario, "epsilon", 0.01)
    n_max = _default(args, scenario, "n_max", 32)
    samples = _default(args, scenario, "samples", 200)
    horizon = args.horizon
    if horizon is None and "horizon" in scenario.defaults:
        horizon = int(scenario.defaults["horizon"])
    report = verify_strong(
        f, scenario.measure, epsilon, samples, n_max, args.tol, args.seed,
        horizon=horizon, threads=args.threads, node_budget=args.node_budget,
        scenario_digest=scenario.digest)
    threshold = scenario.threshold("verify-strong", "min_certified_fraction")
    met = threshold is None or report.certified_fraction >= threshold
    lines = _verification_lines(
        f"strong-approximation campaign ({scenario.name}, "
        f"epsilon={float(Fraction(epsilon))}, n_max={n_max})",
        report, threshold, met)
    result = _verification_payload(report, threshold)
    params = {"epsilon": float(Fraction(epsilon)), "n_max": n_max,
              "samples": samples, "seed": args.seed,
              "tol": float(Fraction(args.tol)),
              "horizon": horizon}
    return (0 if met else 1), lines, _payload(
        "verify-strong", scenario, params, result)


def _cmd_verify_weak(args, scenario: Scenario):
    f = _need_function(scenario)
    depth = _default(args, scenario, "depth", 2)
    samples = _default(args, scenario, "samples", 200)
    horizon = args.horizon
    if horizon is None:
        horizon = int(scenario.defaults.get("horizon", DEFAULT_HORIZON))
    report = verify_weak(
        f, scenario.measure, depth, samples, args.tol, args.seed,
        horizon=horizon, threads=args.threads, node_budget=args.node_budget,
        scenario_digest=scenario.digest)
    threshold = scenario.threshold("verify-weak", "min_certified_fraction")
    met = threshold is None or report.certified_fraction >= threshold
    lines = _verification_lines(
        f"weak-approximation campaign ({scenario.name}, depth={depth})",
        report, threshold, met)
    result = _verification_payload(report, threshold)
    params = {"depth": depth, "samples": samples, "seed": args.seed,
              "tol": float(Fraction(args.tol)), "horizon": horizon}
    return (0 if met else 1), lines, _payload(
        "verify-weak", scenario, params, result)


def _profile_payload(profile: FinitisticProfile) -> dict:
    mu = profile.measure
    head = []
    for i in range(1, mu.switch_index):
        a = mu.assignment_at(i)
        if isinstance(a, MeasureAssignment):
            head.append({"coordinate": i, "kind": "measure",
                         "weights": [float(w) for w in a.measure.weights]})
        else:
            head.append({"coordinate": i, "kind": "dirac",
                         "symbol": a.point.coordinate(i)})
    return {"switch_index": mu.switch_index, "head": head}


def _cmd_game(args, scenario: Scenario):
    verb = args.verb
    if verb == "value":
        if scenario.game is None:
            raise ScenarioError("scenario declares no game", scenario.source)
        res = best_response_value(scenario.game, scenario.measure, args.tol,
                                  node_budget=args.node_budget)
        lines = [f"best response against the scenario profile ({scenario.name})",
                 f"  value in [{float(res.interval.lo)!r}, "
                 f"{float(res.interval.hi)!r}]",
                 f"  argmax action {res.action!r}"]
        per_action = [
            {"action": a, **_interval_payload(r.interval)}
            for a, r in res.per_action
        ]
        result = {"value": _interval_payload(res.interval),
                  "action": res.action, "per_action": per_action}
        return 0, lines, _payload("game-value", scenario,
                                  {"tol": float(Fraction(args.tol))}, result)

    if verb == "purify":
        if scenario.game is None:
            raise ScenarioError("scenario declares no game", scenario.source)
        epsilon = _default(args, scenario, "epsilon", 0.1)
        n_max = _default(args, scenario, "n_max", 16)
        res = purify(scenario.game, scenario.measure, epsilon, n_max,
                     args.tol, args.seed, retries=args.retries,
                     node_budget=args.node_budget)
        lines = [
            f"purified profile ({scenario.name}, epsilon="
            f"{float(Fraction(epsilon))})",
            f"  switch index n = {res.n} (Dirac from coordinate {res.n} on)",
            f"  sample attempt {res.attempt}",
        ]
        for c in res.per_action:
            lines.append(
                f"  action {c.action!r}: E_sigma in "
                f"[{float(c.sigma_value.lo)!r}, {float(c.sigma_value.hi)!r}], "
                f"E_profile in [{float(c.profile_value.lo)!r}, "
                f"{float(c.profile_value.hi)!r}]"
            )
        result = {
            "n": res.n,
            "attempt": res.attempt,
            "sample_seed": res.sample_seed,
            "profile": _profile_payload(res.profile),
            "per_action": [
                {"action": c.action,
                 "sigma_value": _interval_payload(c.sigma_value),
                 "profile_value": _interval_payload(c.profile_value)}
                for c in res.per_action
            ],
            "eta": float(res.eta),
        }
        params = {"epsilon": float(Fraction(epsilon)), "n_max": n_max,
                  "seed": args.seed, "tol": float(Fraction(args.tol))}
        return 0, lines, _payload("game-purify", scenario, params, result)

    if verb == "naming-demo":
        value = naming_game_value(scenario.measure)
        samples = _default(args, scenario, "samples", 100)
        exploits = []
        all_pay_one = True
        for j in range(samples):
            sub = derive_seed(args.seed, "naming-profile", j)
            switch = 1 + (derive_seed(sub, "switch") % 6)
            head = tuple(
                MeasureAssignment(scenario.measure.coordinate_measure(i))
                for i in range(1, switch))
            tail = LazyPoint(derive_seed(sub, "tail"), scenario.measure)
            profile = FinitisticProfile(HybridMeasure(head, switch, tail))
            n, sym = naming_game_exploit(profile)
            # engine-verified: naming (n, sym) pays exactly 1 against tau
            payoff = Cylinder(n, {
                key: F1 if key[n - 1] == sym else F0
                for key in itertools.product(
                    *(scenario.spaces.space_at(i).symbols
                      for i in range(1, n + 1)))
            })
            res = expect(payoff, profile.measure, args.tol)
            ok = res.interval.is_point and res.interval.lo == 1
            all_pay_one = all_pay_one and ok
            exploits.append({"profile": j, "coordinate": n, "symbol": sym})
        lines = [
            f"naming game ({scenario.name})",
            f"  mixing value  {float(value)!r}  "
            f"({_frac_str(value)}; no action does better)",
            f"  exploited {samples} finitistic profiles, payoff 1 each: "
            f"{all_pay_one}",
        ]
        result = {"value": float(value), "value_rational": _frac_str(value),
                  "profiles_exploited": samples,
                  "all_payoff_one": all_pay_one,
                  "exploits": exploits}
        params = {"samples": samples, "seed": args.seed}
        return (0 if all_pay_one else 1), lines, _payload(
            "game-naming-demo", scenario, params, result)

    raise ScenarioError(f"unknown game verb {verb!r}")


HANDLERS = {
    "expect": _cmd_expect,
    "gn-trace": _cmd_gn_trace,
    "strong-approx": _cmd_strong_approx,
    "weak-approx": _cmd_weak_approx,
    "verify-strong": _cmd_verify_strong,
    "verify-weak": _cmd_verify_weak,
    "game": _cmd_game,
}


def run_scenario(path: str, command: str, args) -> int:
    """Load a scenario, dispatch a command, emit reports, return exit code."""
    scenario = load_scenario(path)
    code, lines, payload = HANDLERS[command](args, scenario)
    text = "\n".join(lines) + "\n"
    machine = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.report == "machine":
        sys.stdout.write(machine)
    else:
        sys.stdout.write(text)
    if args.report_dir is not None:
        directory = Path(args.report_dir)
        directory.mkdir(parents=True, exist_ok=True)
        stem = re.sub(r"[^A-Za-z0-9._-]+", "-", f"{command}-{scenario.name}")
        (directory / f"{stem}.txt").write_text(text, encoding="utf-8")
        (directory / f"{stem}.json").write_text(machine, encoding="utf-8")
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0,
                        help="64-bit master seed (default 0)")
    common.add_argument("--tol", type=Fraction, default=Fraction(1, 10**9),
                        help="certification tolerance (default 1e-9)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads for verification campaigns")
    common.add_argument("--report-dir", default=None,
                        help="write text + machine reports into this directory")
    common.add_argument("--report", choices=("text", "machine"), default="text",
                        help="stdout format (default text)")
    common.add_argument("--node-budget", type=int, default=200_000)
    common.add_argument("--horizon", type=int, default=None,
                        help="realization horizon for lazy points")

    parser = argparse.ArgumentParser(
        prog="prodex",
        description="certified expectations and approximation certificates "
                    "under infinite product measures",
        epilog="built-in scenarios: " + ", ".join(sorted(BUILTIN_SCENARIOS)))
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expect", parents=[common],
                       help="certified enclosure of E[f]")
    p.add_argument("scenario")

    p = sub.add_parser("gn-trace", parents=[common],
                       help="reverse-martingale trace g_1..g_N at a point")
    p.add_argument("scenario")
    p.add_argument("--point", default="lazy",
                   help="named scenario point, or 'lazy' to sample one")
    p.add_argument("--n-max", dest="n_max", type=int, default=None)

    p = sub.add_parser("strong-approx", parents=[common],
                       help="smallest certified strong-approximation index")
    p.add_argument("scenario")
    p.add_argument("--point", default="lazy")
    p.add_argument("--epsilon", type=Fraction, default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)

    p = sub.add_parser("weak-approx", parents=[common],
                       help="single-coordinate mixing certificate for E[f]")
    p.add_argument("scenario")
    p.add_argument("--r", type=Fraction, default=None,
                   help="override the target value (default: midpoint of E[f])")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--retries", type=int, default=8)

    p = sub.add_parser("verify-strong", parents=[common],
                       help="Monte Carlo campaign for strong approximations")
    p.add_argument("scenario")
    p.add_argument("--epsilon", type=Fraction, default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("verify-weak", parents=[common],
                       help="Monte Carlo campaign for weak 0-approximations")
    p.add_argument("scenario")
    p.add_argument("--depth", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)

    p = sub.add_parser("game", parents=[common],
                       help="minmax evaluation, purification, naming demo")
    p.add_argument("scenario")
    p.add_argument("verb", choices=("value", "purify", "naming-demo"))
    p.add_argument("--epsilon", type=Fraction, default=None)
    p.add_argument("--n-max", dest="n_max", type=int, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--retries", type=int, default=8)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return run_scenario(args.scenario, args.command, args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProdexError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
