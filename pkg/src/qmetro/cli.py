"""Command-line interface.

Usage::

    qmetro validate channel.json
    qmetro bound --model dephasing --eta 0.8 --method both
    qmetro bound --channel channel.json --method ce --json
    qmetro sweep --model lossy_interferometer --eta 0.95 --n-max 1000 --out fig2.csv
    qmetro oracle --model dephasing --eta 0.8 --n 3 --restarts 32 --seed 1
    qmetro export-model --model dephasing --eta 0.8 > dephasing.json

Exit codes: 0 success, 2 invalid channel, 3 unreadable input, 4 resource
limit, 5 solver failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys

from ._config import BudgetExceeded, ChannelValidationError
from .channel import ChannelFormatError, channel_to_dict, load_channel, validate
from .classical import InconsistentClassification, cs_bound
from .extension import ce_sdp_bound
from .models import MODELS, ModelSpec, build
from .oracle import optimize_input
from .sweep import COLUMNS, crossover, enhancement_factor, sweep

EXIT_OK, EXIT_INVALID, EXIT_PARSE, EXIT_BUDGET, EXIT_SOLVER = 0, 2, 3, 4, 5


def _clean(obj):
    """Replace non-finite floats by None so the output is strict JSON."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _emit(obj) -> None:
    print(json.dumps(_clean(obj), indent=2))


def _channel(args):
    if getattr(args, "channel", None):
        ch = load_channel(args.channel)
        report = validate(ch)
        if not report.valid:
            raise ChannelValidationError("; ".join(report.problems))
        return ch, None
    if args.model is None or args.eta is None:
        raise ChannelFormatError("give --channel FILE or both --model and --eta")
    spec = ModelSpec(args.model, args.eta, unitary_limit=args.unitary_limit)
    return build(spec, args.phi0), spec


def _add_source(p, channel=True):
    p.add_argument("--model", choices=MODELS)
    p.add_argument("--eta", type=float)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--unitary-limit", action="store_true", help="allow eta = 1 (noiseless channel)")
    if channel:
        p.add_argument("--channel", help="channel JSON document")


def cmd_validate(args) -> int:
    ch = load_channel(args.input)
    report = validate(ch)
    if args.json:
        _emit(report.to_dict())
    else:
        print("valid" if report.valid else "INVALID")
        print(f"  completeness defect      {report.completeness_defect:.3e}")
        print(f"  derivative defect        {report.derivative_defect:.3e}")
        print(f"  independence margin      {report.independence_margin:.3e}")
        print(f"  Choi min eigenvalue      {report.choi_min_eig:.3e}")
        for p in report.problems:
            print(f"  problem: {p}")
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_bound(args) -> int:
    ch, spec = _channel(args)
    out = {}
    if args.method in ("cs", "both"):
        out["cs"] = cs_bound(ch).to_dict()
    if args.method in ("ce", "both"):
        ce = ce_sdp_bound(ch)
        d = ce.to_dict()
        if ce.feasible and args.restarts:
            # independent-probe reference from the best single-probe input
            f1 = optimize_input(ch, 1, restarts=args.restarts, seed=0).best_qfi
            d["single_probe_qfi"] = f1
            d["enhancement_factor"] = enhancement_factor(ce.bound_const, f1)
        out["ce"] = d
        if ce.feasible and not ce.solver_status.startswith(("optimal", "fallback")):
            return EXIT_SOLVER
    if spec is not None:
        out["model"] = {"name": spec.name, "eta": spec.eta}
    if args.json:
        _emit(out)
        return EXIT_OK
    for method, d in out.items():
        if method == "model":
            continue
        c = d["bound_const"]
        if c is None:
            reason = d.get("classification") or d.get("note")
            print(f"{method}: not-applicable ({reason})")
        else:
            print(f"{method}: bound_const = {c:.12g}   (delta_phi_N >= {c:.6g}/sqrt(N))")
        if "enhancement_factor" in d:
            print(f"{method}: enhancement vs independent probes = {d['enhancement_factor']:.6g}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    ch, _ = _channel(args)
    rows, notices = sweep(ch, args.n_max, oracle_max=args.oracle_max, restarts=args.restarts, seed=args.seed)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh)
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow(r.cells())
    finally:
        if args.out:
            fh.close()
    const = rows[0].bound
    if math.isfinite(const):
        n_star = crossover(const, args.n_max)
        notices.append(f"crossover N* = {n_star}")
    for note in notices:
        print(note, file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    ch, _ = _channel(args)
    res = optimize_input(ch, args.n, restarts=args.restarts, seed=args.seed)
    ce = ce_sdp_bound(ch)
    d = res.to_dict()
    d["ce_qfi_bound"] = ce.qfi_bound(args.n)
    _emit(d)
    bound = ce.qfi_bound(args.n)
    print(f"sandwich: oracle {res.best_qfi:.12g} <= CE bound {bound:.12g}", file=sys.stderr)
    return EXIT_OK


def cmd_export_model(args) -> int:
    ch, _ = _channel(args)
    _emit(channel_to_dict(ch))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qmetro", description="Precision bounds for noisy phase estimation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a channel JSON document")
    p.add_argument("input")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bound", help="classical-simulation and/or channel-extension bound")
    _add_source(p)
    p.add_argument("--method", choices=("cs", "ce", "both"), default="both")
    p.add_argument("--json", action="store_true")
    p.add_argument("--restarts", type=int, default=8, help="restarts for the single-probe reference (0 disables)")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("sweep", help="CSV of delta_phi versus N")
    _add_source(p)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--oracle-max", type=int, default=0, help="largest N with an oracle column entry")
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("oracle", help="optimise pure N-probe inputs for the QFI")
    _add_source(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("export-model", help="write a built-in model as a channel JSON document")
    _add_source(p, channel=False)
    p.set_defaults(func=cmd_export_model)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ChannelFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ChannelValidationError as exc:
        print(f"invalid channel: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except BudgetExceeded as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InconsistentClassification as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
