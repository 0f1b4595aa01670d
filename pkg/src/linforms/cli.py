"""Command-line front end.

A thin client over the shared pipeline: parse flags, build the request,
run it (locally by default, or against a running HTTP service with
``--server``) and print the JSON report.  Exit code 0 for
factored / exists-over-closure, 1 for not-product, 2 for errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import urllib.error
import urllib.request

from .oracle import DEFAULT_SAMPLE_BOUND
from .pipeline import (
    ALGORITHMS,
    STATUS_CLOSURE,
    STATUS_FACTORED,
    STATUS_NOT_PRODUCT,
    PolySource,
    RunOptions,
    execute,
)

_EXIT_CODES = {STATUS_FACTORED: 0, STATUS_CLOSURE: 0, STATUS_NOT_PRODUCT: 1}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linforms",
        description="Decide and compute factorizations of a polynomial "
        "into a product of linear forms, from black-box evaluation only.",
    )
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--expr", help="expression text, e.g. 'x1^2 - x2^2'")
    source.add_argument("--circuit", help="path to a circuit JSON file")
    source.add_argument("--sparse", help="path to a sparse polynomial text file")
    parser.add_argument(
        "--algorithm",
        choices=ALGORITHMS,
        default="auto",
        help="factoring algorithm (default: auto = lie, then hyperplane, then bivariate)",
    )
    parser.add_argument(
        "--decide-only",
        action="store_true",
        help="only decide existence over the algebraic closure (Lie checks 1-3)",
    )
    parser.add_argument(
        "--deterministic-line-test",
        action="store_true",
        help="hyperplane algorithm: use the k-1 call line containment test",
    )
    parser.add_argument("--degree", type=int, help="exact total degree, if known")
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument(
        "--sample-bound",
        type=int,
        default=DEFAULT_SAMPLE_BOUND,
        help="size of the integer sampling set (default 2^20)",
    )
    parser.add_argument(
        "--reduce-essential",
        action="store_true",
        help="first reduce to the essential variables of the input",
    )
    parser.add_argument(
        "--json",
        dest="json_output",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="print the machine-readable JSON report (default on)",
    )
    parser.add_argument(
        "--server",
        metavar="URL",
        help="delegate the run to a linforms HTTP service at URL",
    )
    return parser


def _read_source(args) -> PolySource:
    if args.expr is not None:
        return PolySource(expr=args.expr)
    if args.sparse is not None:
        with open(args.sparse, encoding="utf-8") as fh:
            return PolySource(sparse_text=fh.read())
    with open(args.circuit, encoding="utf-8") as fh:
        return PolySource(circuit_data=json.load(fh))


def _request_payload(source: PolySource, options: RunOptions) -> dict:
    return {
        "expr": source.expr,
        "sparse": source.sparse_text,
        "circuit": source.circuit_data,
        "algorithm": options.algorithm,
        "seed": options.seed,
        "sample_bound": options.sample_bound,
        "degree": options.degree,
        "decide_only": options.decide_only,
        "deterministic_line_test": options.deterministic_line_test,
        "reduce_essential": options.reduce_essential,
    }


def _run_remote(source: PolySource, options: RunOptions, server: str) -> dict:
    url = server.rstrip("/") + "/factor"
    body = json.dumps(_request_payload(source, options)).encode()
    request = urllib.request.Request(
        url, data=body, headers={"Content-Type": "application/json"}
    )
    with urllib.request.urlopen(request) as response:
        return json.loads(response.read().decode())


def _print_human(report: dict) -> None:
    print(f"status: {report['status']}")
    if report.get("lambda") is not None:
        print(f"lambda: {report['lambda']}")
        for factor in report["factors"]:
            coeffs = " ".join(factor["coeffs"])
            print(f"form: [{coeffs}] ^ {factor['exponent']}")
    print(f"blackbox calls: {report['blackbox_calls']}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        source = _read_source(args)
        options = RunOptions(
            algorithm=args.algorithm,
            seed=args.seed,
            sample_bound=args.sample_bound,
            degree=args.degree,
            decide_only=args.decide_only,
            deterministic_line_test=args.deterministic_line_test,
            reduce_essential=args.reduce_essential,
        )
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.server:
        try:
            payload = _run_remote(source, options, args.server)
        except (urllib.error.URLError, json.JSONDecodeError) as exc:
            print(f"error: server request failed: {exc}", file=sys.stderr)
            return 2
        report_dict = payload
        message = None
    else:
        report = execute(source, options)
        report_dict = report.to_dict()
        message = report.message
    if args.json_output:
        print(json.dumps(report_dict))
    else:
        _print_human(report_dict)
    if message and report_dict["status"] != STATUS_FACTORED:
        print(message, file=sys.stderr)
    return _EXIT_CODES.get(report_dict["status"], 2)


if __name__ == "__main__":
    sys.exit(main())
