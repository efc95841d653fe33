"""Command-line front end: ``jumping-champions census|predict|verify``.

Every flag can also come from a ``key = value`` config file (``--config``)
or from an environment variable ``JC_<FLAG>`` (dashes become
underscores). Precedence: command line, environment, config file,
built-in default.

Exit codes: 0 success, 1 hard verification failure, 2 usage error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import logging
import os
import random
import shlex
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path

from . import __version__
from .averages import average_ratio_sum, check_ratio_identity, gallagher_ms_average, reports_to_csv, verify_A_identity
from .census import (
    MAX_K,
    Anchor,
    BudgetExceeded,
    GapPattern,
    bonferroni_check,
    champions_of,
    pi_tuple_empirical,
    run_census,
    write_snapshots_csv,
    write_snapshots_json,
)
from .hardy_littlewood import default_family, predict_champion, sieve_upper_bound
from .primes import primes_array

log = logging.getLogger("jumping_champions")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
ENV_PREFIX = "JC_"


class HardFailure(Exception):
    pass


# -- argument types ------------------------------------------------------------

def number(text: str) -> int:
    """Integer that may be written in scientific notation (``1e6``)."""
    try:
        val = Decimal(str(text).strip())
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if val != val.to_integral_value():
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    return int(val)


def number_list(text: str) -> list[int]:
    return [number(t) for t in str(text).split(",") if t.strip()]


def k_value(text: str) -> int:
    k = number(text)
    if not 1 <= k <= MAX_K:
        raise argparse.ArgumentTypeError(f"k must lie in [1, {MAX_K}], got {k}")
    return k


def pattern_arg(text: str) -> GapPattern:
    try:
        return GapPattern(number(t) for t in str(text).split(",") if t.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def offsets_arg(text: str) -> tuple[int, ...]:
    vals = sorted(set(number(t) for t in str(text).split(",") if t.strip()))
    if not vals or vals[0] < 0:
        raise argparse.ArgumentTypeError(f"offsets must be nonnegative integers: {text!r}")
    return tuple(vals)


def pattern_list(text: str) -> list[GapPattern]:
    return [pattern_arg(t) for t in str(text).split(";") if t.strip()]


# -- output helpers ------------------------------------------------------------

def _header(command: str) -> str:
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return f"jumping_champions {__version__}, {command}, {stamp}"


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _table(rows: list[dict], fields: list[str], command: str, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"meta": _header(command), "rows": rows}, indent=1) + "\n"
    buf = io.StringIO()
    buf.write(f"# {_header(command)}\n")
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


# -- commands ------------------------------------------------------------------

def cmd_census(args, command: str) -> int:
    checkpoints = args.checkpoints or [args.limit]
    if max(checkpoints) > args.limit:
        raise argparse.ArgumentTypeError(
            f"checkpoint {max(checkpoints)} exceeds --limit {args.limit}"
        )
    out = Path(args.out or "census_out")
    out.mkdir(parents=True, exist_ok=True)
    state = out / f"census_state_k{args.k}.json" if args.resume else None
    snaps = run_census(
        sorted(set(checkpoints)),
        args.k,
        Anchor(args.anchor),
        segment_size=args.segment_size,
        workers=args.threads,
        state_path=state,
    )
    champ_rows = []
    for s in snaps:
        stem = out / f"snapshot_k{s.k}_x{s.x}"
        if args.format == "json":
            write_snapshots_json([s], stem.with_suffix(".json"), meta={"header": _header(command)})
        else:
            write_snapshots_csv([s], stem.with_suffix(".csv"), header_comment=_header(command))
        rec = champions_of(s)
        for p in rec.champions:
            champ_rows.append(
                {
                    "x": s.x,
                    "k": s.k,
                    "pattern": p.label,
                    "count": rec.max_count,
                    "gcd": rec.gcds[p],
                    "gcd_squarefree": str(rec.gcd_squarefree(p)).lower(),
                }
            )
    fields = ["x", "k", "pattern", "count", "gcd", "gcd_squarefree"]
    (out / "champions.csv").write_text(_table(champ_rows, fields, command, "csv"))
    for r in champ_rows:
        print(",".join(str(r[f]) for f in fields))
    return EXIT_OK


def cmd_predict(args, command: str) -> int:
    if args.patterns:
        family = [p for p in args.patterns if p.k == args.k]
        if len(family) != len(args.patterns):
            raise argparse.ArgumentTypeError(f"every pattern must have {args.k} differences")
    else:
        family = default_family(args.x, args.k, args.dmax)
    preds = []
    if family:
        ranking = predict_champion(args.x, args.k, family, args.truncation)
        preds = [pr for _, _, pr in ranking if pr.singular_series > 0]
    if not preds:
        log.warning("every candidate pattern has a vanishing singular series; empty table")
    rows = [
        {
            "pattern": pr.D.label,
            "singular_series": repr(pr.singular_series),
            "main": repr(pr.main_term),
            "corrected": repr(pr.corrected),
            "rank": i,
        }
        for i, pr in enumerate(preds, 1)
    ]
    _emit(_table(rows, ["pattern", "singular_series", "main", "corrected", "rank"], command, args.format), args.out)
    return EXIT_OK


def _verify_bonferroni(args):
    rep = bonferroni_check(args.x, args.pattern, args.I, args.H, budget=args.budget)
    lines = [f"bonferroni x={args.x} pattern={rep.pattern.label} I={args.I} H={rep.H}: "
             f"{rep.lower} <= {rep.count} <= {rep.upper}"]
    hard = [] if rep.holds else ["Bonferroni inequality violated"]
    soft = []
    if args.I > 0:
        prev = bonferroni_check(args.x, args.pattern, args.I - 1, args.H, budget=args.budget)
        if not (prev.lower <= rep.lower and rep.upper <= prev.upper):
            soft.append(f"bounds did not tighten from I={args.I - 1}")
    return lines, hard, soft


def _verify_sieve_bound(args):
    offsets = args.offsets
    lines, hard, soft = [], [], []
    for x in args.xs:
        emp = pi_tuple_empirical(x, offsets)
        bound = sieve_upper_bound(x, offsets, args.truncation)
        ratio = emp / bound
        lines.append(f"sieve-bound x={x} offsets={','.join(map(str, offsets))}: "
                     f"empirical={emp} bound={bound:.3f} ratio={ratio:.4f}")
        if emp > bound:
            hard.append(f"empirical count exceeds the sieve bound at x={x}")
    return lines, hard, soft


def _verify_average(args):
    lines, hard, soft = [], [], []
    reps = [average_ratio_sum(args.offsets, H, args.truncation) for H in args.Hs]
    lines.append(reports_to_csv(reps).rstrip("\n"))
    norms = [r.normalized for r in reps]
    for a, b in zip(norms, norms[1:]):
        if b > 2 * a:
            soft.append(f"normalized deviation grew more than 2x: {a:.4g} -> {b:.4g}")
    return lines, hard, soft


def _verify_a_identity(args):
    rng = random.Random(args.seed)
    primes = [int(p) for p in primes_array(args.pmax)]
    violations = checked = 0
    for _ in range(args.samples):
        size = rng.randint(1, 5)
        D = rng.sample(range(0, 200), size)
        d0 = rng.choice([d for d in range(0, 220) if d not in D])
        for p in primes:
            w = verify_A_identity(p, D)
            if w.trivial:
                continue
            checked += 1
            if not w.is_zero or not check_ratio_identity(D, d0, p):
                violations += 1
    return ([f"a-identity: {checked} (p, D) cases, {violations} violations"],
            [f"{violations} exact identity violations"] if violations else [], [])


def _verify_gallagher(args):
    rep = gallagher_ms_average(args.k, args.dmax, args.truncation)
    lines = [f"gallagher k={rep.k} D={rep.D_limit}: brute={rep.brute_sum:.6f} "
             f"D^k={rep.leading:.1f} (rel err {rep.rel_err_leading:.3e}) "
             f"three-term={rep.three_term:.6f} (rel err {rep.rel_err_three_term:.3e})"]
    soft = [] if rep.rel_err_three_term < rep.rel_err_leading else ["three-term expansion is not closer"]
    return lines, [], soft


SUITES = {
    "bonferroni": _verify_bonferroni,
    "sieve-bound": _verify_sieve_bound,
    "average": _verify_average,
    "a-identity": _verify_a_identity,
    "gallagher": _verify_gallagher,
}


_DEFAULT_OFFSETS = {"bonferroni": (6,), "sieve-bound": (0, 2), "average": (0,)}


def cmd_verify(args, command: str) -> int:
    offsets = args.pattern or _DEFAULT_OFFSETS.get(args.suite, ())
    args.offsets = tuple(offsets)
    if args.suite == "bonferroni":
        try:
            args.pattern = GapPattern(d for d in offsets if d != 0)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc))
    if args.xs is None:
        args.xs = [args.x]
    lines, hard, soft = SUITES[args.suite](args)
    print(f"# {_header(command)}")
    for ln in lines:
        print(ln)
    for s in soft:
        print(f"SOFT: {s}")
    for h in hard:
        print(f"FAIL: {h}")
    if hard or (args.strict and soft):
        print("result: fail")
        return EXIT_FAIL
    print("result: pass")
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value file supplying defaults for any flag")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--out", help="output path (directory for census)")
    common.add_argument("--threads", type=number, default=os.cpu_count() or 1)
    common.add_argument("--truncation", type=number, default=10**6,
                        help="truncation point of Euler products")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="jumping-champions", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("census", parents=[common], help="count gap patterns of consecutive primes")
    c.add_argument("--limit", type=number, required=True)
    c.add_argument("--k", type=k_value, default=1)
    c.add_argument("--checkpoints", type=number_list)
    c.add_argument("--anchor", choices=[a.value for a in Anchor], default=Anchor.LARGEST_LE_X.value)
    c.add_argument("--segment-size", type=number, default=1 << 20)
    c.add_argument("--resume", action="store_true", help="keep a resumable state file in --out")
    c.set_defaults(func=cmd_census)

    p = sub.add_parser("predict", parents=[common], help="rank patterns by predicted count")
    p.add_argument("--x", type=number, required=True)
    p.add_argument("--k", type=k_value, default=1)
    p.add_argument("--dmax", type=number)
    p.add_argument("--patterns", type=pattern_list,
                   help="semicolon-separated patterns of comma-separated diffs, e.g. '2,6;4,6'")
    p.set_defaults(func=cmd_predict)

    v = sub.add_parser("verify", parents=[common], help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--x", type=number, default=10**4)
    v.add_argument("--xs", type=number_list, help="several x values (sieve-bound)")
    v.add_argument("--pattern", type=offsets_arg,
                   help="gap pattern (bonferroni) or offsets including 0 (sieve-bound, average)")
    v.add_argument("--I", type=number, default=1)
    v.add_argument("--H", type=number)
    v.add_argument("--Hs", type=number_list, default=[100, 1000, 10000])
    v.add_argument("--k", type=number, default=2)
    v.add_argument("--dmax", type=number, default=100)
    v.add_argument("--pmax", type=number, default=1000)
    v.add_argument("--samples", type=number, default=100)
    v.add_argument("--seed", type=number, default=0)
    v.add_argument("--budget", type=number, default=10**9)
    v.add_argument("--strict", action="store_true", help="fail on soft trend checks too")
    v.set_defaults(func=cmd_verify)
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"bad config line: {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.lstrip("-").replace("_", "-")] = val
    return out


def _subcommand_flags(parser: argparse.ArgumentParser, command: str) -> dict[str, str]:
    """Map lower-cased flag names of ``command`` to their spelling, e.g. ``i -> I``."""
    for action in parser._subparsers._group_actions:
        sub = action.choices.get(command)
        if sub is not None:
            return {
                opt[2:].lower(): opt[2:]
                for a in sub._actions
                for opt in a.option_strings
                if opt.startswith("--")
            }
    return {}


def _with_defaults(argv: list[str], parser: argparse.ArgumentParser) -> list[str]:
    """Prepend flags taken from the config file and the environment.

    Keys the chosen subcommand does not know are ignored, so one config
    file or environment can serve every command.
    """
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    settings: dict[str, str] = {}
    if known.config:
        settings.update(_read_config(known.config))
    for key, val in os.environ.items():
        if key.startswith(ENV_PREFIX):
            settings[key[len(ENV_PREFIX):].replace("_", "-")] = val
    if not settings or not argv:
        return argv
    flags = _subcommand_flags(parser, argv[0])
    given = {a.split("=", 1)[0][2:].lower() for a in argv if a.startswith("--")}
    extra = []
    for key, val in settings.items():
        key = key.lower()
        if key in given or key == "config" or key not in flags:
            continue
        if val.lower() in ("true", "yes", "on"):
            extra.append(f"--{flags[key]}")
        elif val.lower() in ("false", "no", "off"):
            continue
        else:
            extra += [f"--{flags[key]}", val]
    # subcommand (and verify's suite) come first; flags may follow anywhere
    head = 2 if argv[0] == "verify" and len(argv) > 1 else 1
    return argv[:head] + extra + argv[head:]


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        argv = _with_defaults(argv, parser)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    command = "jumping-champions " + " ".join(shlex.quote(a) for a in argv)
    try:
        return args.func(args, command)
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (AssertionError, HardFailure) as exc:
        print(f"FAIL: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
