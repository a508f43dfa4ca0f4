"""Command-line entry point for the verification suites.

``relcat verify`` runs one suite (or all of them) over generated
instances and emits the report as JSON or text.  Exit codes: 0 when every
check passes, 1 on any FAIL, 2 for configuration errors, 3 when the only
blemishes are INCONCLUSIVE verdicts.
"""

from __future__ import annotations

import argparse
import json
import sys

from .generators import GenParams
from .reports import FAIL, INCONCLUSIVE
from .suites import SUITE_IDS, run_suite


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="relcat",
        description=(
            "Mechanical checks of the ladder retraction, the comparison "
            "isomorphisms, and the homology probes on generated instances."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    verify = sub.add_parser("verify", help="run a verification suite")
    verify.add_argument("--suite", required=True, choices=SUITE_IDS + ("all",))
    verify.add_argument("--seed", type=int, default=0, help="master seed (u64)")
    verify.add_argument("--instances", type=int, default=10)
    verify.add_argument("--max-obj", type=int, default=3)
    verify.add_argument("--trunc-p", type=int, default=2)
    verify.add_argument("--trunc-k", type=int, default=2)
    verify.add_argument("--trunc-q", type=int, default=2)
    verify.add_argument("--hom-degree", type=int, default=1)
    verify.add_argument(
        "--no-acyclic",
        action="store_true",
        help="draw plain (possibly cyclic) categories instead of acyclic ones",
    )
    verify.add_argument("--format", choices=("json", "text"), default="json")
    verify.add_argument("--out", default=None, help="write the report here")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.instances < 1:
        print("configuration error: instances must be positive", file=sys.stderr)
        return 2
    params = GenParams(
        seed=args.seed,
        max_objects=args.max_obj,
        trunc_p=args.trunc_p,
        trunc_k=args.trunc_k,
        trunc_q=args.trunc_q,
        degree=args.hom_degree,
        acyclic=not args.no_acyclic,
    )
    suites = SUITE_IDS if args.suite == "all" else (args.suite,)
    try:
        reports = [run_suite(s, params, args.instances) for s in suites]
    except ValueError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    if args.format == "json":
        if args.suite == "all":
            text = json.dumps([r.to_dict() for r in reports], indent=2)
        else:
            text = json.dumps(reports[0].to_dict(), indent=2)
    else:
        text = "\n\n".join(r.to_text() for r in reports)
    if args.out is None:
        print(text)
    else:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    worsts = {r.worst() for r in reports}
    if FAIL in worsts:
        return 1
    if INCONCLUSIVE in worsts:
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
