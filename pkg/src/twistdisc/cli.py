"""Command-line entry point: ``twistdisc <subcommand> ...``.

Exit codes: 0 success (YES where a verdict applies), 1 NO or a failed
campaign assertion, 2 UNKNOWN, 64 usage error, 65 data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .campaigns import (
    SCHEMA_VERSION,
    CampaignPreconditionError,
    ReportCache,
    SamplingPlan,
    scan_pl,
    verify_four_states,
    verify_size_bound,
    verify_three_states,
)
from .discrimination import DiscriminationInstance, Verdict, solve
from .operators import GbsLabel, LatticeLabel, gbs_basis, gbs_unitary, lattice_basis, lattice_unitary, twist_table
from .serialize import MalformedPayload, matrix_from_json, matrix_to_json, unitary_from_json, vector_from_json
from .teleport import MesBasis, expand_teleport, outcome_histogram, sample_outcomes

EXIT_OK, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
VERDICT_EXIT = {Verdict.YES: EXIT_OK, Verdict.NO: EXIT_NO, Verdict.UNKNOWN: EXIT_UNKNOWN}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        if ".." in part:
            lo, hi = part.split("..")
            out += list(range(int(lo), int(hi) + 1))
        elif part.strip():
            out.append(int(part))
    return out


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="twistdisc", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"twistdisc {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON here instead of stdout")
    common.add_argument("--json-only", action="store_true", help="suppress the human summary on stderr")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen-basis", parents=[common], help="emit a GBS or lattice basis")
    p.add_argument("--family", choices=["gbs", "lattice"], required=True)
    p.add_argument("--dim", type=int, required=True)

    p = sub.add_parser("check-twist", parents=[common], help="twist-commutativity of a basis file")
    p.add_argument("--in", dest="infile", required=True)

    p = sub.add_parser("teleport", parents=[common], help="branch table of twist teleportation")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--family", choices=["gbs", "lattice"], default="gbs")
    p.add_argument("--resource", type=int, required=True)
    p.add_argument("--state", required=True, help="JSON vector file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--shots", type=int, default=0)

    p = sub.add_parser("discriminate", parents=[common], help="decide distinguishability")
    p.add_argument("--dim", type=int)
    p.add_argument("--family", choices=["gbs", "lattice"], default="gbs")
    p.add_argument("--labels", help='"(m,n);(m,n)" or "p^r:[s]/[t]*...;..."')
    p.add_argument("--in", dest="infile", help="JSON list of matrix objects")
    p.add_argument("--budget", type=int, default=64)
    p.add_argument("--seed", type=int, default=0)

    for name, hlp in (("verify", "verification campaign"), ("scan-pl", "P(l) evidence scan")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        if name == "verify":
            p.add_argument("--theorem", type=int, choices=[3, 4, 5], required=True)
            p.add_argument("--dim", type=int, required=True)
            p.add_argument("--l", type=int)
            p.add_argument("--plan", choices=["auto", "exhaustive", "sampled", "stratified"])
        else:
            p.add_argument("--l", type=int, required=True)
            p.add_argument("--dims", type=_dims, required=True, help="e.g. 2..20 or 3,5,7")
            p.add_argument("--plan", choices=["auto", "exhaustive", "sampled"], default="sampled")
        p.add_argument("--samples", type=int)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=64)
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--full", action="store_true", help="include per-instance records")
        p.add_argument("--no-cache", action="store_true")
    return ap


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"malformed JSON in {path}: {exc}") from exc


def _matrices_payload(obj) -> list:
    if isinstance(obj, dict) and "matrices" in obj:
        obj = obj["matrices"]
    if not isinstance(obj, list) or not obj:
        raise DataError("expected a non-empty list of matrix objects")
    return obj


def _parse_labels(text: str, family: str, dim: int | None):
    parts = [p for p in text.split(";") if p.strip()]
    if family == "gbs":
        if dim is None:
            raise UsageError("--dim is required for GBS labels")
        labels = [GbsLabel.parse(p, dim) for p in parts]
        return [gbs_unitary(lb) for lb in labels], labels
    labels = [LatticeLabel.parse(p) for p in parts]
    if dim is not None and any(lb.dim != dim for lb in labels):
        raise DataError(f"lattice labels do not multiply to --dim {dim}")
    return [lattice_unitary(lb) for lb in labels], labels


def cmd_gen_basis(args):
    us, labels = (gbs_basis if args.family == "gbs" else lattice_basis)(args.dim)
    payload = {"family": args.family, "dim": args.dim, "labels": [str(lb) for lb in labels],
               "matrices": [matrix_to_json(u) for u in us]}
    return payload, f"{len(us)} {args.family} unitaries at d={args.dim}", EXIT_OK


def cmd_check_twist(args):
    mats = [matrix_from_json(m) for m in _matrices_payload(_read_json(args.infile))]
    table = twist_table(mats)
    payload = table.summary()
    return payload, f"is_twist={table.is_twist} over {table.size} elements", EXIT_OK


def cmd_teleport(args):
    basis = MesBasis.gbs(args.dim) if args.family == "gbs" else MesBasis.lattice(args.dim)
    psi = vector_from_json(_read_json(args.state))
    if psi.dim != args.dim:
        raise DataError(f"state has dim {psi.dim}, expected {args.dim}")
    table = expand_teleport(psi, basis, args.resource)
    payload = {"branch_table": table.to_dict()}
    if args.shots:
        payload["histogram"] = outcome_histogram(sample_outcomes(table, args.shots, args.seed), len(basis))
    return payload, f"{len(table.branches)} branches, reconstruction error {table.reconstruction_error:.2e}", EXIT_OK


def cmd_discriminate(args):
    if args.infile:
        mats = [unitary_from_json(m) for m in _matrices_payload(_read_json(args.infile))]
        inst = DiscriminationInstance(tuple(mats), family="generic", strict=False)
    elif args.labels:
        us, labels = _parse_labels(args.labels, args.family, args.dim)
        inst = DiscriminationInstance(tuple(us), tuple(labels), args.family)
    else:
        raise UsageError("discriminate needs --labels or --in")
    cert = solve(inst, args.budget, args.seed)
    payload = {"certificate": cert.to_dict(), "size": len(inst), "dim": inst.dim}
    tag = cert.proof_tag.value if cert.proof_tag else "-"
    return payload, f"{cert.verdict.value} ({tag})", VERDICT_EXIT[cert.verdict]


def _plan(args, default: SamplingPlan) -> SamplingPlan:
    kind = args.plan or default.kind
    samples = args.samples if args.samples is not None else default.samples
    if kind in ("auto", "exhaustive"):
        return SamplingPlan(kind, samples)
    return SamplingPlan(kind, samples or 300)


def _campaign_request(args) -> dict:
    return {k: v for k, v in vars(args).items()
            if k not in ("out", "json_only", "full", "no_cache", "workers")}


def cmd_verify(args):
    if args.theorem == 3:
        if args.l is None:
            raise UsageError("--l is required for --theorem 3")
        runner = lambda: verify_size_bound(args.dim, args.l, _plan(args, SamplingPlan("auto", 500)),  # noqa: E731
                                         args.seed, args.budget, args.workers)
    elif args.theorem == 4:
        runner = lambda: verify_three_states(args.dim, _plan(args, SamplingPlan("auto", 2000)),  # noqa: E731
                                             args.seed, args.budget, args.workers)
    else:
        runner = lambda: verify_four_states(args.dim, _plan(args, SamplingPlan("stratified", 300)),  # noqa: E731
                                            args.seed, args.budget, args.workers)
    return _run_cached(args, runner)


def cmd_scan_pl(args):
    runner = lambda: scan_pl(args.l, args.dims, _plan(args, SamplingPlan("sampled", 200)),  # noqa: E731
                             args.seed, args.budget, args.workers)
    return _run_cached(args, runner)


def _run_cached(args, runner):
    request = _campaign_request(args)
    cache = ReportCache()
    report = None if args.no_cache else cache.get(request)
    cached = report is not None
    if report is None:
        report = runner().to_dict()
        if not args.no_cache:
            cache.put(request, report)
    passed = not report["asserted"] or (not report["failures"]
                                         and report["counts"]["YES"] == sum(report["counts"].values()))
    if not args.full:
        report = {k: v for k, v in report.items() if k != "records"}
    summary = (f"{report['campaign_id']} d={report['dims']} l={report['l']}: {report['counts']}"
               f"{' (cached)' if cached else ''}; {'PASS' if passed else 'FAIL'}"
               f"{'' if report['asserted'] else ' (not asserted)'}")
    return {"report": report, "cached": cached}, summary, EXIT_OK if passed else EXIT_NO


COMMANDS = {
    "gen-basis": cmd_gen_basis,
    "check-twist": cmd_check_twist,
    "teleport": cmd_teleport,
    "discriminate": cmd_discriminate,
    "verify": cmd_verify,
    "scan-pl": cmd_scan_pl,
}


def parse_and_dispatch(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = {k: v for k, v in vars(args).items()}
    try:
        payload, summary, code = COMMANDS[args.command](args)
    except (UsageError, CampaignPreconditionError) as exc:
        print(f"twistdisc: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, MalformedPayload, ValueError, IndexError, KeyError) as exc:
        print(f"twistdisc: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    doc = {"schema_version": SCHEMA_VERSION, "version": __version__, "config": config, **payload}
    text = json.dumps(doc, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if not args.json_only:
        print(f"twistdisc {args.command}: {summary}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    return parse_and_dispatch(argv)


if __name__ == "__main__":
    raise SystemExit(main())
