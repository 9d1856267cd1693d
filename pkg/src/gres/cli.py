"""Command-line interface: ``gres classify | robustness | sweep | verify-witness``.

Exit codes: 0 success, 2 input error, 3 unsupported request.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import GHZ, robustness
from .bounds.dispatch import METHODS
from .bounds.families import SUPPORTED
from .bounds.result import RESOURCES
from .criteria import is_classical, is_separable_two_mode
from .exceptions import GresError, InvalidArgument, Unsupported
from .fock import WitnessEigenParams, verify_witness
from .symplectic import SymmetricSpec, TwoModeStandardForm, cm_from_json, is_physical

EXIT_OK, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 2, 3

CSV_HEADER = (
    "swept", "lower", "upper", "log_lower", "log_upper", "gap",
    "lower_method", "upper_method", "converged",
)

#: sweep presets: fixed (a, b), c1 chosen per panel, c2 swept
PRESETS = {
    "fig1a": {"resource": "nonclassicality", "a": 2.4, "b": 2.0},
    "fig1b": {"resource": "entanglement", "a": 2.4, "b": 2.0},
}
PRESET_C1 = (1.8, 1.6, 1.4, 1.2)
PRESET_POINTS = 8

#: parameters each family accepts (also the names that may be swept)
FAMILY_PARAMS = {
    "single-mode": ("a", "b", "c"),
    "two-mode-standard": ("a", "b", "c1", "c2"),
    "symmetric": ("n", "a", "b", "c1", "c2"),
    "ghz": ("n", "r", "eta"),
}


def _fmt(x) -> str:
    """17 significant digits, enough for an exact float round trip."""
    return format(float(x), ".17g")


# --- state construction --------------------------------------------------------

def build_state(family: str, params: dict):
    """State object for ``family`` from a dict of parameters (missing ones default to 0)."""
    if family not in FAMILY_PARAMS:
        raise Unsupported(f"unknown family {family!r}; supported families: {', '.join(SUPPORTED)}")
    get = lambda k, d=None: params.get(k) if params.get(k) is not None else d  # noqa: E731
    for key in FAMILY_PARAMS[family]:
        if key in ("c", "c1", "c2", "eta"):
            continue
        if get(key) is None:
            raise InvalidArgument(f"family {family!r} needs --{key}")
    if family == "single-mode":
        c = get("c", 0.0)
        return np.array([[get("a"), c], [c, get("b")]], dtype=float)
    if family == "two-mode-standard":
        c = get("c")
        return TwoModeStandardForm(get("a"), get("b"), get("c1", c if c is not None else 0.0),
                                   get("c2", c if c is not None else 0.0))
    n = get("n")
    if int(n) != n:
        raise InvalidArgument("--n must be an integer")
    if family == "symmetric":
        return SymmetricSpec(int(n), get("a"), get("b"), get("c1", 0.0), get("c2", 0.0))
    return GHZ(int(n), get("r"), get("eta", 0.0))


# --- classify -------------------------------------------------------------------

def cmd_classify(args) -> int:
    try:
        with open(args.cm, encoding="utf-8") as fh:
            gamma = cm_from_json(fh.read())
    except OSError as exc:
        raise InvalidArgument(f"cannot read {args.cm}: {exc}") from exc
    phys = is_physical(gamma)
    report = {"n": gamma.shape[0] // 2, "physical": phys.physical, "min_eigenvalue": phys.min_eigenvalue}
    if not phys:
        words = ["unphysical"]
    else:
        cls = is_classical(gamma)
        report.update(classical=cls.classical, margin=cls.margin)
        words = ["physical", "classical" if cls else "nonclassical"]
        if gamma.shape[0] == 4:
            sep = is_separable_two_mode(gamma)
            report["separable"] = sep
            words.append("separable" if sep else "entangled")
    report["summary"] = ", ".join(words)
    if args.json:
        print(json.dumps(report))
    else:
        print(report["summary"])
        if "margin" in report:
            print(f"classicality margin: {report['margin']:.6g}")
    return EXIT_OK


# --- robustness -------------------------------------------------------------------

def _params(args) -> dict:
    return {k: getattr(args, k, None) for k in ("n", "a", "b", "c", "c1", "c2", "r", "eta")}


def cmd_robustness(args) -> int:
    if args.cm:
        with open(args.cm, encoding="utf-8") as fh:
            state = cm_from_json(fh.read())
    elif args.family:
        state = build_state(args.family, _params(args))
    else:
        raise InvalidArgument("give --family with parameters, or --cm FILE")
    res = robustness(state, args.resource, method=args.method, starts=args.starts)
    print(json.dumps(res.to_dict(metadata=args.metadata), default=float))
    return EXIT_OK


# --- sweep ------------------------------------------------------------------------

@dataclass(frozen=True)
class SweepRequest:
    family: str
    resource: str
    fixed: dict
    swept: str
    values: tuple
    method: str = "auto"
    starts: int = 8


def parse_range(text: str) -> tuple:
    """``start:stop:step`` (inclusive of ``stop`` up to rounding)."""
    try:
        start, stop, step = (float(x) for x in text.split(":"))
    except ValueError as exc:
        raise InvalidArgument(f"range must be start:stop:step, got {text!r}") from exc
    if not step > 0:
        raise InvalidArgument("range step must be positive")
    if stop < start:
        raise InvalidArgument(f"empty range {text!r}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + k * step for k in range(count))


def _physical_point(family: str, params: dict) -> bool:
    try:
        state = build_state(family, params)
    except InvalidArgument:
        return False
    gamma = state.expand() if hasattr(state, "expand") else state
    return bool(is_physical(gamma))


def preset_request(name: str, c1: float, points: int, method: str, starts: int) -> SweepRequest:
    cfg = PRESETS[name]
    fixed = {"a": cfg["a"], "b": cfg["b"], "c1": c1}
    grid = [c1 * k / points for k in range(1, points + 1)]
    values = tuple(v for v in grid if _physical_point("two-mode-standard", {**fixed, "c2": v}))
    return SweepRequest("two-mode-standard", cfg["resource"], fixed, "c2", values, method, starts)


def _evaluate(job):
    req, value = job
    params = dict(req.fixed)
    params[req.swept] = value
    state = build_state(req.family, params)
    return robustness(state, req.resource, method=req.method, starts=req.starts)


def worker_count() -> int:
    cap = os.environ.get("GRES_THREADS")
    n = os.cpu_count() or 1
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError as exc:
            raise InvalidArgument(f"GRES_THREADS must be an integer, got {cap!r}") from exc
    return n


def run_sweep(req: SweepRequest, workers: int = 1) -> list:
    """Bounds for every grid value, in grid order."""
    jobs = [(req, v) for v in req.values]
    if workers <= 1 or len(jobs) <= 1:
        results = [_evaluate(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs))
    return list(zip(req.values, results))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for value, res in rows:
        writer.writerow([
            _fmt(value), _fmt(res.lower), _fmt(res.upper), _fmt(res.log_lower),
            _fmt(res.log_upper), _fmt(res.gap), res.lower_method, res.upper_method,
            str(res.converged).lower(),
        ])
    return buf.getvalue()


def rows_to_json(rows) -> str:
    out = []
    for value, res in rows:
        d = res.to_dict()
        d.update(swept=value, log_lower=res.log_lower, log_upper=res.log_upper)
        out.append(d)
    return json.dumps(out, indent=1) + "\n"


def cmd_sweep(args) -> int:
    if args.preset:
        req = preset_request(args.preset, args.c1 if args.c1 is not None else PRESET_C1[0],
                             args.points, args.method, args.starts)
        if args.range:
            req = SweepRequest(req.family, req.resource, req.fixed, "c2", parse_range(args.range),
                               args.method, args.starts)
    else:
        if not (args.family and args.resource and args.swept and args.range):
            raise InvalidArgument("sweep needs --preset, or --family, --resource, --swept and --range")
        if args.swept not in FAMILY_PARAMS.get(args.family, ()):
            raise InvalidArgument(f"{args.swept!r} is not a parameter of family {args.family!r}")
        fixed = {k: v for k, v in _params(args).items() if v is not None and k != args.swept}
        req = SweepRequest(args.family, args.resource, fixed, args.swept, parse_range(args.range),
                           args.method, args.starts)
    if not req.values:
        raise InvalidArgument("sweep grid is empty")

    rows = run_sweep(req, worker_count())
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_json(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = sum(not r.converged for _, r in rows)
    if bad:
        print(f"warning: {bad} of {len(rows)} points did not converge", file=sys.stderr)
    return EXIT_OK


# --- verify-witness -------------------------------------------------------------

DEFAULT_WITNESS = (3.0, 0.5, 0.6, 4.0)


def cmd_verify_witness(args) -> int:
    a, b, c, d = args.params if args.params else DEFAULT_WITNESS
    params = WitnessEigenParams(args.n, a, b, c, d)
    try:
        report = verify_witness(params, args.cutoff, starts=args.starts, seed=args.seed)
    except Unsupported as exc:
        raise Unsupported(f"{exc}; try a smaller --cutoff") from exc
    print(json.dumps(report.to_dict(), default=float))
    return EXIT_OK


# --- parser ---------------------------------------------------------------------

def _add_state_args(p):
    for name in ("a", "b", "c", "c1", "c2", "r", "eta"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gres", description="Robustness bounds for Gaussian states."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="physicality, classicality and separability of a CM")
    p.add_argument("--cm", required=True, help="CM JSON file")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("robustness", help="lower and upper robustness bounds as JSON")
    p.add_argument("--resource", required=True, choices=RESOURCES)
    p.add_argument("--family", choices=tuple(FAMILY_PARAMS))
    p.add_argument("--cm", help="CM JSON file instead of --family")
    _add_state_args(p)
    p.add_argument("--method", default="auto", choices=METHODS)
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--metadata", action="store_true", help="include metadata in the output")
    p.set_defaults(func=cmd_robustness)

    p = sub.add_parser("sweep", help="bounds along a parameter grid (CSV or JSON)")
    p.add_argument("--preset", choices=tuple(PRESETS))
    p.add_argument("--points", type=int, default=PRESET_POINTS, help="grid size for presets")
    p.add_argument("--resource", choices=RESOURCES)
    p.add_argument("--family", choices=tuple(FAMILY_PARAMS))
    p.add_argument("--swept", help="name of the swept parameter")
    p.add_argument("--range", help="start:stop:step")
    _add_state_args(p)
    p.add_argument("--method", default="auto", choices=METHODS)
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--format", default="csv", choices=("csv", "json"))
    p.add_argument("--output", "-o", help="write to this file instead of stdout")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-witness", help="product-state maximum of a symmetric Gaussian witness")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--cutoff", type=int, default=4)
    p.add_argument("--params", type=float, nargs=4, metavar=("A", "B", "C", "D"),
                   help="witness CM eigenvalues: x block (symmetric, rest), p block (symmetric, rest)")
    p.add_argument("--starts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify_witness)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Unsupported as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except (InvalidArgument, GresError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
