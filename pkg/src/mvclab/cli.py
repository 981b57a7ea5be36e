"""Command-line front end.

Exit codes: 0 clean, 1 contract violation found, 2 usage or parameter error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from fractions import Fraction

from . import bounds as bnd
from .errors import BudgetExceeded, UnsupportedParams
from .model import SystemParams, fmt_q, fmt_q_dec, format_pattern
from .schemes import SCHEMES, get_scheme
from .verifier import DEFAULT_SAMPLE_EVERY, default_seed, verify

COST_COLUMNS = ["c", "v", "replication", "mds", "alg1", "alg2", "ext_latest",
                "wc14a_lb", "prop1_lb", "wc14b_lb", "prop2_lb"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _range(text: str) -> range:
    """'3' or '2-6' (inclusive)."""
    try:
        lo, _, hi = text.partition("-")
        lo_i = int(lo)
        hi_i = int(hi) if hi else lo_i
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N or A-B") from None
    if lo_i < 1 or hi_i < lo_i:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return range(lo_i, hi_i + 1)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mvclab", description="Multi-version coding lab")
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", help="exhaustively verify a scheme")
    v.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--c", type=int, required=True)
    v.add_argument("--v", type=int, required=True)
    v.add_argument("--mode", default="original", choices=["original", "extended", "extended-general"])
    v.add_argument("--json", metavar="PATH", help="write the full report as JSON")
    v.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    v.add_argument("--sample-every", type=int, default=DEFAULT_SAMPLE_EVERY,
                   help="run the codec on one in K obligations")

    c = sub.add_parser("costs", help="tabulate scheme costs against all bounds")
    c.add_argument("--c-range", type=_range, default=_range("2-6"))
    c.add_argument("--v-range", type=_range, default=_range("1-6"))
    c.add_argument("--format", choices=["csv", "json"], default="csv")

    b = sub.add_parser("bounds", help="print all four lower bounds")
    b.add_argument("--c", type=int, required=True)
    b.add_argument("--v", type=int, default=1)

    w = sub.add_parser("witness", help="print the n = c+1 witness pattern")
    w.add_argument("--c", type=int, required=True)
    w.add_argument("--v", type=int, required=True)

    a = sub.add_parser("audit", help="run the profile-nullification audit")
    a.add_argument("--scheme", required=True, choices=sorted(SCHEMES))
    a.add_argument("--c", type=int, required=True)
    a.add_argument("--v", type=int, required=True)
    return p


def _cost_or_na(name: str, c: int, v: int) -> Fraction | None:
    try:
        return get_scheme(name).claimed_worst_cost(c, v)
    except UnsupportedParams:
        return None


def cost_rows(c_range, v_range) -> list[dict[str, Fraction | int | None]]:
    rows = []
    for c in c_range:
        for v in v_range:
            row = {"c": c, "v": v}
            for name in COST_COLUMNS[2:7]:
                row[name] = _cost_or_na(name, c, v)
            row.update(bnd.all_bounds(c, v))
            rows.append(row)
    return rows


def _cell(x) -> str:
    if x is None:
        return "NA"
    if isinstance(x, int):
        return str(x)
    return fmt_q_dec(x)


def cmd_verify(args, out) -> int:
    if args.workers < 1 or args.sample_every < 1:
        raise UsageError("--workers and --sample-every must be positive")
    params = SystemParams(args.n, args.c, args.v)
    mode = args.mode.replace("-", "_")
    rep = verify(args.scheme, params, mode, workers=args.workers, seed=default_seed(),
                 sample_every=args.sample_every)
    print(f"scheme={rep.scheme} mode={rep.mode} n={params.n} c={params.c} v={params.v}", file=out)
    print(f"obligations={rep.obligations_checked} violations={rep.violation_count} "
          f"codec_checks={rep.codec_checks} codec_mismatches={len(rep.codec_mismatches)}", file=out)
    eq = "==" if rep.measured_worst_cost == rep.claimed_worst_cost else "!="
    print(f"measured_worst_cost={fmt_q_dec(rep.measured_worst_cost)} {eq} "
          f"claimed={fmt_q_dec(rep.claimed_worst_cost)}", file=out)
    print(rep.summary_line(), file=out)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rep.to_json(), fh, indent=2)
    return 0 if rep.clean else 1


def cmd_costs(args, out) -> int:
    rows = cost_rows(args.c_range, args.v_range)
    if args.format == "json":
        json.dump([{k: (fmt_q(x) if isinstance(x, Fraction) else x) for k, x in r.items()} for r in rows],
                  out, indent=2)
        out.write("\n")
    else:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(COST_COLUMNS)
        for r in rows:
            w.writerow([_cell(r[k]) for k in COST_COLUMNS])
    return 0


def cmd_bounds(args, out) -> int:
    if args.c < 1 or args.v < 1:
        raise UsageError("need c >= 1 and v >= 1")
    for k, q in bnd.all_bounds(args.c, args.v).items():
        print(f"{k}={fmt_q_dec(q)}", file=out)
    return 0


def cmd_witness(args, out) -> int:
    if args.c < 1 or args.v < 1:
        raise UsageError("need c >= 1 and v >= 1")
    out.write(format_pattern(bnd.prop1_witness(args.c, args.v)))
    return 0


def cmd_audit(args, out) -> int:
    res = bnd.profile_audit(args.scheme, SystemParams(args.c, args.c, args.v))
    json.dump(res.to_json(), out, indent=2)
    out.write("\n")
    return 1 if res.violation else 0


COMMANDS = {"verify": cmd_verify, "costs": cmd_costs, "bounds": cmd_bounds,
            "witness": cmd_witness, "audit": cmd_audit}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.cmd](args, out)
    except (UsageError, UnsupportedParams, BudgetExceeded, ValueError) as exc:
        print(f"mvclab: error: {exc}", file=err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
