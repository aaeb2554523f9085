"""Command-line surface: one subcommand per figure, plus the validation suite.

Every run emits a single table as CSV or JSON. The CSV form starts with a
``#``-prefixed JSON header carrying ``schema=1``, the command name, and the
full effective parameter set, so a run can be reproduced from its own output;
the JSON form is the same object with the rows inlined. Output is a pure
function of the parsed config (plus the seed for ``validate``), byte for
byte.

Exit codes: 0 success, 1 parameter error, 2 validation failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Sequence

import numpy as np

from .distributions import model_cdf, quantile
from .models import ArrivalModel, TurboModel
from .pricing import FastLaneProblem, fast_lane_price_bound
from .scenarios import RaceConfig, RewardSchedule, expected_utility_schedule, utility_vs_alpha
from .turbo import cdf_turbo
from .validation import run_validation

__all__ = ["main", "build_parser"]

_SCHEMA = 1

_DEFAULT_K = 32
_DEFAULT_N = 64
_DEFAULT_LAMBDA1 = 32.0
_DEFAULT_LAMBDA_MAX = 64.0
_DEFAULT_REWARD = 1.0
_DEFAULT_N_COMPETITORS = 20
_DEFAULT_S_REWARDED = 7


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # route argparse failures to exit code 1
        raise _UsageError(message)


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"grid must look like min:max:points, got {text!r}")
    try:
        lo, hi, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValueError(f"grid must look like min:max:points, got {text!r}") from None
    if not (points >= 1):
        raise ValueError(f"grid needs at least one point, got {points}")
    if not (0.0 <= lo <= hi):
        raise ValueError(f"grid bounds must satisfy 0 <= min <= max, got {text!r}")
    if points > 1 and hi == lo:
        raise ValueError(f"grid with {points} points needs max > min, got {text!r}")
    return np.linspace(lo, hi, points)


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _render(header: dict, rows: list[list], fmt: str) -> str:
    if fmt == "json":
        payload = dict(header)
        payload["rows"] = [
            [v if isinstance(v, str) else _json_number(v) for v in row] for row in rows
        ]
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header["columns"])
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _json_number(value):
    if isinstance(value, (bool, np.bool_)):
        return 1 if value else 0
    if isinstance(value, (int, np.integer)):
        return int(value)
    return float(value)


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8") as fh:
        fh.write(text)


def _emit(args, command: str, params: dict, columns: list[str], rows: list[list],
          extra: dict | None = None) -> None:
    header = {"schema": _SCHEMA, "command": command, "params": params, "columns": columns}
    if extra:
        header.update(extra)
    _write(_render(header, rows, args.format), args.out)


def _base_models(k: int, n: int, lam: float) -> dict[str, ArrivalModel]:
    return {
        "unsharded": ArrivalModel.unsharded(k, lam),
        "uncoded": ArrivalModel.uncoded(k, lam),
        "fixed_rate": ArrivalModel.fixed_rate(k, n, lam),
        "rateless": ArrivalModel.rateless(k, lam),
    }


def _cmd_cdf(args) -> int:
    taus = _parse_grid(args.grid)
    models = _base_models(args.k, args.n, args.lambda1)
    columns = ["tau"] + [f"F_{name}" for name in models]
    values = {name: np.atleast_1d(model_cdf(m, taus)) for name, m in models.items()}
    rows = [
        [taus[i]] + [values[name][i] for name in models] for i in range(taus.size)
    ]
    params = {"k": args.k, "n": args.n, "lambda1": args.lambda1, "grid": args.grid}
    extra = None
    if args.service_level is not None:
        level = args.service_level
        if not (0.0 < level < 1.0):
            raise ValueError(f"service level must lie in (0, 1), got {level!r}")
        params["service_level"] = level
        extra = {
            "service_times": {name: quantile(m, level) for name, m in models.items()}
        }
    _emit(args, "cdf", params, columns, rows, extra)
    return 0


def _cmd_price(args) -> int:
    taus = _parse_grid(args.grid)
    models = _base_models(args.k, args.n, args.lambda1)
    columns = ["tau"] + [f"price_{name}" for name in models]
    bounds = {
        name: args.r * np.atleast_1d(model_cdf(m, taus)) / args.lambda1
        for name, m in models.items()
    }
    rows = [
        [taus[i]] + [bounds[name][i] for name in models] for i in range(taus.size)
    ]
    params = {
        "k": args.k, "n": args.n, "lambda1": args.lambda1, "r": args.r, "grid": args.grid,
    }
    _emit(args, "price", params, columns, rows)
    return 0


def _cmd_turbo_price(args) -> int:
    grid = _parse_grid(args.grid)
    rates = [float(l2) for l2 in grid if l2 > 0]
    if not rates:
        raise ValueError("the fast-lane grid needs at least one positive rate")
    headroom = args.lambda_max - args.lambda1
    if rates[-1] > headroom * (1.0 + 1e-9):
        raise ValueError(
            f"fast-lane grid exceeds capacity headroom {headroom:g} under the cap"
        )
    models = _base_models(args.k, args.n, args.lambda1)
    problems = {
        name: FastLaneProblem(m, args.lambda_max, args.tau, args.r)
        for name, m in models.items()
    }
    columns = ["lambda2"]
    for name in models:
        columns += [f"price_over_r_{name}", f"revenue_over_r_{name}"]
    rows = []
    for l2 in rates:
        row = [l2]
        for name in models:
            price = fast_lane_price_bound(problems[name], l2)
            row += [price / args.r, price * l2 / args.r]
        rows.append(row)
    params = {
        "k": args.k, "n": args.n, "lambda1": args.lambda1,
        "lambda_max": args.lambda_max, "tau": args.tau, "r": args.r, "grid": args.grid,
    }
    _emit(args, "turbo-price", params, columns, rows)
    return 0


def _cmd_multideadline(args) -> int:
    grid = _parse_grid(args.grid)
    schedule = RewardSchedule.harmonic(args.r, args.tau, args.horizon)
    models = _base_models(args.k, args.n, args.lambda1)
    columns = ["lambda2"]
    for name in models:
        columns += [f"eu_{name}", f"tail_{name}"]
    rows = []
    for l2 in grid:
        row = [float(l2)]
        for name, base in models.items():
            turbo = TurboModel(base, float(l2))
            row.append(expected_utility_schedule(lambda t: cdf_turbo(t, turbo), schedule))
            row.append(1.0 - cdf_turbo(schedule.last_deadline, turbo))
        rows.append(row)
    params = {
        "k": args.k, "n": args.n, "lambda1": args.lambda1, "tau": args.tau,
        "r": args.r, "horizon": args.horizon, "grid": args.grid,
    }
    _emit(args, "multideadline", params, columns, rows)
    return 0


def _cmd_race(args) -> int:
    gas = args.gas if args.gas is not None else args.r / 4.0
    fast = ArrivalModel.rateless(args.k, args.lambda2)
    base = ArrivalModel.uncoded(args.k, args.lambda1)
    config = RaceConfig.with_linear_rewards(
        args.N, args.s, args.r, gas, 0.0, fast, base
    )
    alphas = [args.alpha] if args.alpha is not None else [float(a) for a in _parse_grid(args.grid)]
    columns = ["alpha", "eu_fast_over_r", "eu_base_over_r",
               "fast_participates", "base_participates"]
    rows = []
    for alpha, eu_fast, eu_base in utility_vs_alpha(config, alphas):
        rows.append([alpha, eu_fast / args.r, eu_base / args.r,
                     eu_fast >= 0.0, eu_base >= 0.0])
    params = {
        "k": args.k, "lambda1": args.lambda1, "lambda2": args.lambda2,
        "N": args.N, "s": args.s, "r": args.r, "gas": gas, "grid": args.grid,
    }
    if args.alpha is not None:
        params["alpha"] = args.alpha
    _emit(args, "race", params, columns, rows)
    return 0


def _cmd_validate(args) -> int:
    results = run_validation(
        trials=args.trials, rank_trials=args.rank_trials, seed=args.seed,
        backend=args.backend,
    )
    columns = ["check", "status", "statistic", "threshold", "detail"]
    rows = [[r.name, r.status, r.statistic, r.threshold, r.detail] for r in results]
    params = {
        "trials": args.trials, "rank_trials": args.rank_trials,
        "seed": args.seed, "backend": args.backend,
    }
    _emit(args, "validate", params, columns, rows)
    failing = [r.name for r in results if r.failed]
    if failing:
        print(f"validation failed: {failing[0]}", file=sys.stderr)
        return 2
    return 0


def _add_output_flags(sub) -> None:
    sub.add_argument("--format", choices=("csv", "json"), default="csv",
                     help="output format (default csv)")
    sub.add_argument("--out", default=None, metavar="PATH",
                     help="write to PATH instead of stdout")


def _add_model_flags(sub, with_n: bool = True) -> None:
    sub.add_argument("--k", type=int, default=_DEFAULT_K,
                     help="units required to decode (default 32)")
    if with_n:
        sub.add_argument("--n", type=int, default=_DEFAULT_N,
                         help="fixed-rate coded shard count (default 64)")
    sub.add_argument("--lambda1", type=float, default=_DEFAULT_LAMBDA1,
                     help="base-lane arrival rate (default 32)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="shardprice",
                     description="Decoding-time distributions and latency pricing "
                                 "for sharded and coded payload delivery.")
    subs = parser.add_subparsers(dest="command", required=True)

    cdf = subs.add_parser("cdf", help="decode-time CDFs of the four regimes")
    _add_model_flags(cdf)
    cdf.add_argument("--grid", default="0:4:201", help="tau grid min:max:points")
    cdf.add_argument("--service-level", type=float, default=None, dest="service_level",
                     help="also report each regime's quantile at this level")
    _add_output_flags(cdf)
    cdf.set_defaults(handler=_cmd_cdf)

    price = subs.add_parser("price", help="single-deadline price bounds over tau")
    _add_model_flags(price)
    price.add_argument("--r", type=float, default=_DEFAULT_REWARD,
                       help="on-time reward (default 1)")
    price.add_argument("--grid", default="0:4:201", help="tau grid min:max:points")
    _add_output_flags(price)
    price.set_defaults(handler=_cmd_price)

    turbo = subs.add_parser("turbo-price",
                            help="fast-lane price and revenue per base variant")
    _add_model_flags(turbo)
    turbo.add_argument("--lambda-max", type=float, default=_DEFAULT_LAMBDA_MAX,
                       dest="lambda_max", help="aggregate rate cap (default 64)")
    turbo.add_argument("--tau", type=float, default=1.0, help="deadline (default 1)")
    turbo.add_argument("--r", type=float, default=_DEFAULT_REWARD,
                       help="on-time reward (default 1)")
    turbo.add_argument("--grid", default="0:32:129",
                       help="fast-lane rate grid min:max:points; zero is dropped")
    _add_output_flags(turbo)
    turbo.set_defaults(handler=_cmd_turbo_price)

    multi = subs.add_parser("multideadline",
                            help="expected utility under the declining-reward schedule")
    _add_model_flags(multi)
    multi.add_argument("--tau", type=float, default=1.0,
                       help="base deadline spacing (default 1)")
    multi.add_argument("--r", type=float, default=_DEFAULT_REWARD,
                       help="first-interval reward (default 1)")
    multi.add_argument("--horizon", type=int, default=16,
                       help="number of deadlines in the schedule (default 16)")
    multi.add_argument("--grid", default="0:32:65",
                       help="fast-lane rate grid min:max:points")
    _add_output_flags(multi)
    multi.set_defaults(handler=_cmd_multideadline)

    race = subs.add_parser("race", help="top-k race utilities over the adoption mix")
    race.add_argument("--k", type=int, default=_DEFAULT_K,
                      help="units required to decode (default 32)")
    race.add_argument("--lambda1", type=float, default=_DEFAULT_LAMBDA1,
                      help="base entrant (uncoded) arrival rate (default 32)")
    race.add_argument("--lambda2", type=float, default=_DEFAULT_LAMBDA1,
                      help="fast entrant (rateless) arrival rate (default 32)")
    race.add_argument("--N", type=int, default=_DEFAULT_N_COMPETITORS, dest="N",
                      help="competitor count (default 20)")
    race.add_argument("--s", type=int, default=_DEFAULT_S_REWARDED, dest="s",
                      help="rewarded rank count (default 7)")
    race.add_argument("--r", type=float, default=_DEFAULT_REWARD,
                      help="top-rank reward scale (default 1)")
    race.add_argument("--gas", type=float, default=None,
                      help="entry cost (default r/4)")
    race.add_argument("--alpha", type=float, default=None,
                      help="evaluate a single adoption fraction instead of the grid")
    race.add_argument("--grid", default="0:1:21", help="alpha grid min:max:points")
    _add_output_flags(race)
    race.set_defaults(handler=_cmd_race)

    validate = subs.add_parser("validate", help="run the oracle validation suite")
    validate.add_argument("--trials", type=int, default=100_000,
                          help="Monte Carlo trials per KS check (default 100000)")
    validate.add_argument("--rank-trials", type=int, default=10_000, dest="rank_trials",
                          help="trials per rank-experiment field size (default 10000)")
    validate.add_argument("--seed", type=int, default=1234, help="RNG seed (default 1234)")
    validate.add_argument("--backend", choices=("auto", "cython", "python"),
                          default="auto", help="rank-kernel backend (default auto)")
    _add_output_flags(validate)
    validate.set_defaults(handler=_cmd_validate)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
