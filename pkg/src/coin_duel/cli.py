"""Command-line front end.

Each subcommand prints a human-readable summary by default, or a JSON report
(``{"manifest": ..., "result": ...}``) or CSV with ``--format``. Exit status is
0 on success, 2 on a usage error and 1 when a computation fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from coin_duel import __version__
from coin_duel.evolving import HazardGame, tie_prob_evolving_exact
from coin_duel.exact_core import StartCounts, expected_turns, tie_prob_finite, tie_prob_truncated
from coin_duel.fitting import FitResult, gompertz_fit, pearson, powerlaw_fit, powerlaw_predict
from coin_duel.markov_oracle import BiasedGame, _as_fraction, tie_prob_dp
from coin_duel.montecarlo import (
    SimConfig,
    SimReport,
    derive_seed,
    evolving_grid,
    simulate_evolving,
    simulate_multicoin,
    simulate_standard,
    tie_curve_vs_p,
)
from coin_duel.multicoin import (
    CoinSet,
    MulticoinGame,
    TieConvention,
    duality_check,
    round_count_pmf,
)

ENGINE = f"coin_duel {__version__}"
THREADS_ENV = "COIN_DUEL_THREADS"
# parameters that never change a result and so stay out of the manifest
_EXECUTION_ONLY = {"threads", "format", "out", "handler"}


class UsageError(Exception):
    pass


def rational(x: Fraction) -> dict[str, str]:
    return {"fraction": f"{x.numerator}/{x.denominator}", "decimal": f"{float(x):.15g}"}


def parse_grid(text: str) -> list[float]:
    """``a,b,c`` lists, or ``start:stop:count`` (integer count) / ``start:stop:step``."""
    if ":" not in text:
        return [float(v) for v in text.split(",") if v.strip()]
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}; use start:stop:count or start:stop:step")
    start, stop = float(parts[0]), float(parts[1])
    third = parts[2]
    if third.isdigit():
        count = int(third)
        if count < 1:
            raise argparse.ArgumentTypeError("grid count must be >= 1")
        return [float(v) for v in np.linspace(start, stop, count)]
    step = float(third)
    if step <= 0:
        raise argparse.ArgumentTypeError("grid step must be positive")
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(count) if start + i * step <= stop + 1e-12]


def parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def parse_coins(text: str) -> CoinSet:
    try:
        return CoinSet.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def parse_probability(text: str) -> Fraction:
    try:
        return _as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a probability: {text!r}")


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"{THREADS_ENV} must be an integer, got {env!r}")
    return 1


def _manifest(args) -> dict[str, Any]:
    params = {}
    for key, value in sorted(vars(args).items()):
        if key in _EXECUTION_ONLY or key == "command":
            continue
        if isinstance(value, Fraction):
            value = f"{value.numerator}/{value.denominator}"
        elif isinstance(value, CoinSet):
            value = list(value.values)
        params[key] = value
    return {
        "command": args.command,
        "parameters": params,
        "seed": getattr(args, "seed", None),
        "outputs": [args.out] if args.out else [],
        "engine_version": ENGINE,
    }


def _sim_dict(report: SimReport) -> dict[str, Any]:
    return report.to_dict()


def _fit_dict(fit: FitResult) -> dict[str, Any]:
    return {
        "params": dict(fit.params),
        "residual_sum_squares": fit.residual_sum_squares,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "gradient_norm": fit.gradient_norm,
    }


class Output:
    """What a command produced: a result dict, optional curve rows, a text summary."""

    def __init__(self, result: dict, text: str, columns: list[str] | None = None, rows=None):
        self.result = result
        self.text = text
        self.columns = columns
        self.rows = rows


def _flatten(d: dict, prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in d.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        elif isinstance(value, (list, tuple)):
            flat[name] = ";".join(str(v) for v in value)
        else:
            flat[name] = value
    return flat


def _render(out: Output, args) -> str:
    if args.format == "json":
        doc = {"manifest": _manifest(args), "result": out.result}
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if out.rows is not None:
            writer.writerow(out.columns)
            writer.writerows(out.rows)
        else:
            flat = _flatten(out.result)
            writer.writerow(list(flat))
            writer.writerow(list(flat.values()))
        return buf.getvalue()
    return out.text.rstrip("\n") + "\n"


# ----------------------------------------------------------------------------
# subcommands


def cmd_exact_tie(args) -> Output:
    p = args.p
    if args.k is not None:
        if args.i1 is not None or args.i2 is not None:
            raise UsageError("give either --k or --i1/--i2, not both")
        if args.k < 1:
            raise UsageError("--k must be >= 1")
        i1 = i2 = args.k
    else:
        if args.i1 is None or args.i2 is None:
            raise UsageError("give --k, or both --i1 and --i2")
        i1, i2 = args.i1, args.i2
    if i1 < 1 or i2 < 1:
        raise UsageError("start counts must be >= 1")
    if not 0 < p <= 1:
        raise UsageError("--p must lie in (0, 1]")
    if i1 == i2 and p == Fraction(1, 2):
        value, method = tie_prob_finite(i1), "closed_form"
    else:
        value, method = tie_prob_dp(i1, i2, p), "lattice_dp"
    r = rational(value)
    result = {"i1": i1, "i2": i2, "p": rational(p)["fraction"], "method": method, "tie": r}
    return Output(result, f"{r['fraction']} = {r['decimal']}")


def cmd_expected_turns(args) -> Output:
    if args.i1 < 1 or args.i2 < 1:
        raise UsageError("start counts must be >= 1")
    start = StartCounts(args.i1, args.i2)
    exact = expected_turns(start)
    r = rational(exact)
    result: dict[str, Any] = {"i1": args.i1, "i2": args.i2, "expected_turns": r}
    text = f"{r['fraction']} = {r['decimal']}"
    if args.simulate:
        rep = simulate_standard(SimConfig(args.simulate, args.seed, BiasedGame(start)), _threads(args))
        z = (rep.mean_turns - float(exact)) / rep.mean_turns_stderr if rep.mean_turns_stderr else 0.0
        result["simulation"] = _sim_dict(rep)
        result["z_score"] = z
        text += (
            f"\nsimulated mean {rep.mean_turns:.6f} +/- {rep.mean_turns_stderr:.6f}"
            f" over {rep.runs} runs (z = {z:+.2f})"
        )
    return Output(result, text)


def cmd_tie_curve(args) -> Output:
    if any(k < 1 for k in args.ks):
        raise UsageError("every k must be >= 1")
    if any(not 0 < p <= 1 for p in args.p_grid):
        raise UsageError("every p must lie in (0, 1]")
    threads = _threads(args)
    rows = []
    for k in args.ks:
        for pt in tie_curve_vs_p(k, args.p_grid, args.runs, args.seed, threads):
            rows.append([f"{pt.x:.15g}", k, f"{pt.tie_rate:.15g}", f"{pt.stderr:.15g}", f"{pt.exact:.15g}"])
    rows.sort(key=lambda r: (float(r[0]), r[1]))
    columns = ["p", "k", "tie_rate", "stderr", "exact"]
    result = {"columns": columns, "rows": rows}
    text = "\n".join(",".join(str(c) for c in row) for row in [columns] + rows)
    return Output(result, text, columns, rows)


def cmd_powerlaw(args) -> Output:
    if args.k_min < 1 or args.k_max <= args.k_min:
        raise UsageError("need 1 <= --k-min < --k-max")
    points = [(k, float(tie_prob_finite(k))) for k in range(args.k_min, args.k_max + 1)]
    fit = powerlaw_fit(points)
    result: dict[str, Any] = {"fit": _fit_dict(fit), "window": [args.k_min, args.k_max]}
    text = f"log P = {fit['intercept']:.6f} + ({fit['slope']:.6f}) log k over {args.k_min}..{args.k_max}"
    if args.check_at:
        exact = tie_prob_truncated(args.check_at, args.eps)
        line = fit
        if args.line:
            line = FitResult({"intercept": args.line[0], "slope": args.line[1]}, 0.0, True, 0)
        pred = powerlaw_predict(line, args.check_at)
        result["check"] = {
            "k": args.check_at,
            "line": dict(line.params),
            "prediction": pred,
            "exact": exact.value,
            "tail_bound": exact.tail_bound,
            "abs_error": abs(pred - exact.value),
        }
        text += (
            f"\nat k={args.check_at}: predicted {pred:.6g}, exact {exact.value:.6g},"
            f" |diff| = {abs(pred - exact.value):.3g}"
        )
    return Output(result, text)


def _parse_line(text: str) -> tuple[float, float]:
    try:
        a, b = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("--line wants INTERCEPT,SLOPE")
    return a, b


def cmd_multicoin(args) -> Output:
    if args.target < 1:
        raise UsageError("--target must be >= 1")
    if args.floor >= 0:
        raise UsageError("--floor must be negative")
    if args.horizon is not None and args.horizon < 1:
        raise UsageError("--horizon must be >= 1")
    convention = args.convention
    if convention is None:
        # the legacy code path counts two capped walks as a tie
        convention = "include_capped" if args.legacy_appendix_b else "exclude_capped"
    threads = _threads(args)
    game = MulticoinGame(args.coins, args.target, args.floor, args.horizon)

    def analyse(g: MulticoinGame) -> dict[str, Any]:
        part: dict[str, Any] = {"coins": list(g.coins.values)}
        if args.runs:
            rep = simulate_multicoin(SimConfig(args.runs, args.seed, g), convention, args.legacy_appendix_b, threads)
            part["simulation"] = _sim_dict(rep)
        if args.exact:
            pmf = round_count_pmf(g, exact=True)
            tie = pmf.sum_of_squares()
            if TieConvention(convention) is TieConvention.INCLUDE_CAPPED:
                tie += float(pmf.residual) ** 2
            part["exact"] = {"tie": tie, "residual": float(pmf.residual), "mode": "stated_game"}
        return part

    result: dict[str, Any] = {
        "target": args.target,
        "floor": args.floor,
        "horizon": game.horizon,
        "convention": TieConvention(convention).value,
        "legacy_appendix_b": args.legacy_appendix_b,
        "game": analyse(game),
    }
    if args.dual_check:
        rep = duality_check(args.coins)
        result["duality"] = {"zero_sum": rep.zero_sum, "pmf_equal": rep.pmf_equal}
        result["dual"] = analyse(game.dual())
        sims = [result["game"].get("simulation"), result["dual"].get("simulation")]
        if all(sims):
            pooled = (sims[0]["tie_rate_stderr"] ** 2 + sims[1]["tie_rate_stderr"] ** 2) ** 0.5
            diff = sims[0]["tie_rate"] - sims[1]["tie_rate"]
            result["duality"]["tie_rate_diff"] = diff
            result["duality"]["pooled_stderr"] = pooled

    lines = [f"coins ({args.coins}) target {args.target} horizon {game.horizon} [{result['convention']}]"]
    for label in ("game", "dual"):
        part = result.get(label)
        if not part:
            continue
        if "simulation" in part:
            s = part["simulation"]
            lines.append(
                f"{label} {tuple(part['coins'])}: tie rate {s['tie_rate']:.6f} +/- {s['tie_rate_stderr']:.6f}"
                f" ({s['ties']} ties, {s['capped']} capped, {s['runs']} runs)"
            )
        if "exact" in part:
            lines.append(f"{label} {tuple(part['coins'])}: exact tie {part['exact']['tie']:.10f}"
                         f" (residual {part['exact']['residual']:.3g})")
    if "duality" in result:
        d = result["duality"]
        lines.append(f"zero-sum {d['zero_sum']}, increment distributions equal {d['pmf_equal']}")
    return Output(result, "\n".join(lines))


def cmd_evolving(args) -> Output:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if any(lam <= 0 for lam in args.lambda_grid):
        raise UsageError("every lambda must be positive")
    if args.runs == 0 and not args.exact:
        raise UsageError("--runs 0 needs --exact")
    threads = _threads(args)
    columns = ["lambda"]
    if args.runs:
        columns += ["tie_rate", "stderr"]
    if args.exact:
        columns += ["exact"]
    rows = []
    fit_y = []
    for idx, lam in enumerate(sorted(args.lambda_grid)):
        row = [f"{lam:.15g}"]
        game = HazardGame(args.n, lam)
        if args.runs:
            rep = simulate_evolving(SimConfig(args.runs, derive_seed(args.seed, idx), game), threads)
            row += [f"{rep.tie_rate:.15g}", f"{rep.tie_rate_stderr:.15g}"]
            y = rep.tie_rate
        if args.exact:
            y = tie_prob_evolving_exact(game)
            row.append(f"{y:.15g}")
        fit_y.append((lam, y))
        rows.append(row)
    result: dict[str, Any] = {"n": args.n, "columns": columns, "rows": rows}
    text = "\n".join(",".join(row) for row in [columns] + rows)
    if args.fit_gompertz:
        fit = gompertz_fit(fit_y)
        result["gompertz"] = _fit_dict(fit)
        result["gompertz"]["source"] = "exact" if args.exact else "simulation"
        summary = (
            f"gompertz fit: L={fit['L']:.6f} g={fit['g']:.6f} lambda0={fit['lambda0']:.6f}"
            f" rss={fit.residual_sum_squares:.3g} converged={fit.converged}"
        )
        text += "\n" + summary
        if args.format == "csv":
            print(summary, file=sys.stderr)
    return Output(result, text, columns, rows)


def cmd_correlation(args) -> Output:
    if any(n < 1 for n in args.n_grid):
        raise UsageError("every n must be >= 1")
    if any(lam <= 0 for lam in args.lambda_grid):
        raise UsageError("every lambda must be positive")
    cells = evolving_grid(args.n_grid, args.lambda_grid, args.runs, args.seed, _threads(args))
    rates = [c.tie_rate for c in cells]
    r_lam = pearson([c.lam for c in cells], rates)
    r_n = pearson([c.n for c in cells], rates) if len(set(args.n_grid)) > 1 else None
    columns = ["n", "lambda", "tie_rate", "stderr"]
    rows = [[c.n, f"{c.lam:.15g}", f"{c.tie_rate:.15g}", f"{c.stderr:.15g}"] for c in cells]
    rows.sort(key=lambda r: (r[0], float(r[1])))
    result = {"r_lambda": r_lam, "r_n": r_n, "columns": columns, "rows": rows}
    text = f"r_lambda = {r_lam:.4f}\nr_n = {'undefined' if r_n is None else f'{r_n:.4f}'}"
    if args.format == "csv":
        print(text, file=sys.stderr)
    return Output(result, text, columns, rows)


# ----------------------------------------------------------------------------


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _nonneg_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="coin-duel", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=ENGINE)
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help: str, stochastic: bool = False) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help)
        p.set_defaults(handler=handler)
        p.add_argument("--format", choices=["text", "json", "csv"], default="text")
        p.add_argument("--out", help="write output to this file instead of stdout")
        if stochastic:
            p.add_argument("--seed", type=_seed, default=0)
            p.add_argument(
                "--threads", type=_positive_int, default=None,
                help=f"worker threads (default ${THREADS_ENV} or 1); never changes results",
            )
        return p

    p = add("exact-tie", cmd_exact_tie, "exact tie probability")
    p.add_argument("--k", type=int)
    p.add_argument("--i1", type=int)
    p.add_argument("--i2", type=int)
    p.add_argument("--p", type=parse_probability, default=Fraction(1, 2), help="head probability, e.g. 1/2 or 0.9")

    p = add("expected-turns", cmd_expected_turns, "exact expected game length", stochastic=True)
    p.add_argument("--i1", type=int, required=True)
    p.add_argument("--i2", type=int, required=True)
    p.add_argument("--simulate", type=_positive_int, metavar="RUNS", help="also simulate this many games")

    p = add("tie-curve", cmd_tie_curve, "tie rate versus head probability", stochastic=True)
    p.add_argument("--ks", type=parse_ints, default=[10, 50])
    p.add_argument("--p-grid", type=parse_grid, default=parse_grid("0.05:1.0:0.05"))
    p.add_argument("--runs", type=_positive_int, default=10_000)

    p = add("powerlaw", cmd_powerlaw, "log-log fit of exact tie probabilities")
    p.add_argument("--k-min", type=int, default=50)
    p.add_argument("--k-max", type=int, default=110)
    p.add_argument("--check-at", type=_positive_int, default=100_000)
    p.add_argument("--eps", type=float, default=1e-9)
    p.add_argument("--line", type=_parse_line, help="check INTERCEPT,SLOPE instead of the fitted line")

    p = add("multicoin", cmd_multicoin, "multi-coin game and its dual", stochastic=True)
    p.add_argument("--coins", type=parse_coins, default=CoinSet((3, -2, -1)))
    p.add_argument("--target", type=int, default=10)
    p.add_argument("--floor", type=int, default=-1000)
    p.add_argument("--horizon", type=int, default=None, help="round cap (default 10 * target * coins)")
    p.add_argument("--runs", type=_nonneg_int, default=100_000)
    p.add_argument("--exact", action="store_true", help="also run the exact round-count DP")
    p.add_argument("--dual-check", action="store_true")
    p.add_argument("--legacy-appendix-b", action="store_true",
                   help="never reset the per-round total between rounds (forensic mode)")
    p.add_argument("--convention", choices=[c.value for c in TieConvention], default=None)

    p = add("evolving", cmd_evolving, "exponential-hazard tie curve", stochastic=True)
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--lambda-grid", type=parse_grid, default=parse_grid("0.1:5:30"))
    p.add_argument("--runs", type=_nonneg_int, default=10_000)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--fit-gompertz", action="store_true")

    p = add("correlation", cmd_correlation, "tie rate correlation with lambda and n", stochastic=True)
    p.add_argument("--lambda-grid", type=parse_grid, default=parse_grid("0.1:5:30"))
    p.add_argument("--n-grid", type=parse_ints, default=[50, 100, 200])
    p.add_argument("--runs", type=_positive_int, default=10_000)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        out = args.handler(args)
        text = _render(out, args)
    except UsageError as exc:
        parser.error(str(exc))
    except (ValueError, ArithmeticError) as exc:
        print(f"coin-duel: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
