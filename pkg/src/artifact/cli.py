"""Command-line surface for the invariant toolkit.

Subcommands: ``compute`` runs the exact search and reports the value with
its witness certificate and the catalog expectation; ``bound`` evaluates
the constructive lower-bound methods and emits the best verified
certificate; ``verify`` independently checks a certificate file; ``table``
reproduces value tables for families of groups under a per-computation
time budget; ``catalog`` dumps the reference records.

Exit codes: 0 success, 1 certificate rejected, 2 bad arguments or
unreadable input, 3 computed value disagrees with the catalog (regression
signal), 4 search aborted on its time budget (the printed value is only a
lower bound), 5 a requested constructive method failed verification.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from pathlib import Path

from . import builders
from .builders import BoundReport, BuilderError, compose_bounds
from .catalog import (
    KIND_DAVENPORT as CATALOG_DAVENPORT,
    KIND_SD as CATALOG_SD,
    KIND_SMALL_DAVENPORT as CATALOG_SMALL_DAVENPORT,
    STATUS_EXACT,
    STATUS_PREDICTION,
    all_records,
    dump_csv,
    lookup,
    predict,
)
from .engine import (
    EngineError,
    InvariantQuery,
    KIND_DAVENPORT,
    KIND_LITTLE_OLSON,
    KIND_OLSON,
    KIND_SD,
    KIND_SD_LEVEL,
    KIND_SMALL_DAVENPORT,
    SearchConfig,
    compute,
)
from .groups import GroupSpec, make_group
from .zseq import Certificate, CertificateFormatError, verify

__all__ = ["main"]

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_USAGE = 2
EXIT_MISMATCH = 3
EXIT_BUDGET = 4
EXIT_CONSTRUCTION = 5

INVARIANT_CHOICES = ("davenport", "small-davenport", "olson", "sd", "ol")
BUDGETED_INVARIANTS = ("olson", "sd", "ol")
METHOD_CHOICES = (
    "auto",
    "cyclic",
    "add-cyclic",
    "rank2",
    "rank3",
    "homocyclic",
    "selfridge25k",
    "classical",
)
FORMAT_CHOICES = ("human", "json", "csv")


# ---------------------------------------------------------------------------
# argument parsing


def _parse_group(text: str) -> tuple[int, ...]:
    parts = [piece.strip() for piece in text.split(",") if piece.strip()]
    if not parts:
        raise argparse.ArgumentTypeError(f"empty group spec {text!r}")
    try:
        moduli = tuple(int(piece) for piece in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"group must be comma-separated integers, got {text!r}"
        ) from None
    if any(m < 1 for m in moduli):
        raise argparse.ArgumentTypeError(f"moduli must be positive, got {text!r}")
    return tuple(m for m in moduli if m > 1)


def _parse_k(text: str) -> float:
    if text.strip().lower() == "inf":
        return math.inf
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--k must be a non-negative integer or 'inf', got {text!r}"
        ) from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"--k must be non-negative, got {text!r}")
    return value


def _parse_budget(text: str) -> float:
    raw = text.strip().lower()
    try:
        if ":" in raw:
            parts = [float(piece) for piece in raw.split(":")]
            if len(parts) > 3 or any(p < 0 for p in parts):
                raise ValueError
            seconds = 0.0
            for part in parts:
                seconds = seconds * 60 + part
        elif raw.endswith(("s", "m", "h")):
            scale = {"s": 1.0, "m": 60.0, "h": 3600.0}[raw[-1]]
            seconds = float(raw[:-1]) * scale
        else:
            seconds = float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"--budget expects seconds, a number with s/m/h suffix, or hh:mm:ss, got {text!r}"
        ) from None
    if not seconds > 0:
        raise argparse.ArgumentTypeError(f"--budget must be positive, got {text!r}")
    return seconds


def _parse_span(text: str) -> tuple[int, int]:
    raw = text.strip()
    try:
        if ":" in raw:
            lo_text, hi_text = raw.split(":", 1)
            lo, hi = int(lo_text), int(hi_text)
        else:
            lo = hi = int(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected N or LO:HI, got {text!r}"
        ) from None
    if lo < 1 or hi < lo:
        raise argparse.ArgumentTypeError(f"bad range {text!r}")
    return lo, hi


def _add_common_flags(sub: argparse.ArgumentParser, default_format: str) -> None:
    sub.add_argument(
        "--threads",
        type=int,
        default=None,
        metavar="N",
        help="worker count (default: available parallelism; 1 = sequential)",
    )
    sub.add_argument(
        "--format",
        choices=FORMAT_CHOICES,
        default=default_format,
        help=f"output format (default: {default_format})",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zsum",
        description=(
            "Exact zero-sum invariants of finite abelian groups: search, "
            "lower-bound construction, and certificate verification."
        ),
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_compute = sub.add_parser(
        "compute", help="compute an invariant exactly by pruned search"
    )
    p_compute.add_argument(
        "--group", type=_parse_group, required=True, metavar="a,b,c",
        help="comma-separated moduli, e.g. 2,4,4",
    )
    p_compute.add_argument(
        "--invariant", choices=INVARIANT_CHOICES, default="sd",
        help="invariant kind (default: sd)",
    )
    p_compute.add_argument(
        "--k", type=_parse_k, default=None, metavar="N|inf",
        help="repeat budget; 'inf' drops the constraint (ignored for "
             "davenport kinds)",
    )
    p_compute.add_argument(
        "--level", type=int, default=1, metavar="L",
        help="multiplicity level of the budget (sd only, default 1)",
    )
    p_compute.add_argument(
        "--budget", type=_parse_budget, default=None, metavar="DUR",
        help="abort after this long and report the best lower bound (exit 4)",
    )
    p_compute.add_argument(
        "--cert", type=Path, default=None, metavar="PATH",
        help="write the witness certificate to this file",
    )
    _add_common_flags(p_compute, "human")

    p_bound = sub.add_parser(
        "bound", help="evaluate constructive lower bounds with certificates"
    )
    p_bound.add_argument("--group", type=_parse_group, required=True, metavar="a,b,c")
    p_bound.add_argument("--k", type=_parse_k, default=None, metavar="N")
    p_bound.add_argument(
        "--level", type=int, default=1, metavar="L",
        help="budget level (cyclic method only, default 1)",
    )
    p_bound.add_argument(
        "--method", choices=METHOD_CHOICES, default="auto",
        help="constructive method (default: auto = best of all families)",
    )
    p_bound.add_argument("--cert", type=Path, default=None, metavar="PATH")
    _add_common_flags(p_bound, "human")

    p_verify = sub.add_parser("verify", help="verify a certificate file")
    p_verify.add_argument("path", type=Path, help="certificate file to check")
    _add_common_flags(p_verify, "human")

    p_table = sub.add_parser(
        "table", help="reproduce a value table for a family of groups"
    )
    p_table.add_argument(
        "--group", type=_parse_group, action="append", metavar="a,b,c",
        help="explicit group (repeatable)",
    )
    p_table.add_argument(
        "--n-range", type=_parse_span, default=None, metavar="LO:HI",
        help="with --r-range: homocyclic grid C_n^r",
    )
    p_table.add_argument(
        "--r-range", type=_parse_span, default=None, metavar="LO:HI",
    )
    p_table.add_argument(
        "--invariant", choices=INVARIANT_CHOICES, default=None,
        help="restrict to one invariant (default: olson and sd)",
    )
    p_table.add_argument("--k", type=_parse_k, default=0, metavar="N|inf")
    p_table.add_argument(
        "--budget", type=_parse_budget, default=60.0, metavar="DUR",
        help="per-computation time budget (default 60s); groups exceeding "
             "it are SKIPPED with a lower bound",
    )
    _add_common_flags(p_table, "csv")

    p_catalog = sub.add_parser("catalog", help="dump the reference-value records")
    p_catalog.add_argument(
        "--group", type=_parse_group, default=None, metavar="a,b,c",
        help="restrict to one group",
    )
    _add_common_flags(p_catalog, "csv")

    return parser


# ---------------------------------------------------------------------------
# shared helpers


def _worker_count(args: argparse.Namespace) -> int:
    if args.threads is None:
        return os.cpu_count() or 1
    return args.threads


def _group_label(moduli: tuple[int, ...]) -> str:
    if not moduli:
        return "C_1"
    return " x ".join(f"C_{m}" for m in moduli)


def _moduli_text(moduli: tuple[int, ...]) -> str:
    return ",".join(str(m) for m in moduli) if moduli else "1"


def _k_text(k: float | None) -> str:
    if k is None:
        return ""
    return "inf" if math.isinf(k) else str(int(k))


def _k_json(k: float | None):
    if k is None:
        return None
    return "inf" if math.isinf(k) else int(k)


def _render_entries(cert: Certificate) -> str:
    seq = cert.to_zseq()
    pieces = []
    for element, mult in seq.entries:
        coords = ",".join(str(c) for c in element.coords)
        pieces.append(f"({coords})" + (f"^{mult}" if mult > 1 else ""))
    return " ".join(pieces) if pieces else "(empty)"


def _engine_query(
    group: GroupSpec, invariant: str, k: float | None, level: int
) -> InvariantQuery:
    if invariant == "davenport":
        return InvariantQuery(group=group, kind=KIND_DAVENPORT)
    if invariant == "small-davenport":
        return InvariantQuery(group=group, kind=KIND_SMALL_DAVENPORT)
    if k is not None and math.isinf(k):
        # An unlimited repeat budget reduces each budgeted invariant to the
        # corresponding unconstrained one.
        if invariant == "ol":
            return InvariantQuery(group=group, kind=KIND_SMALL_DAVENPORT)
        return InvariantQuery(group=group, kind=KIND_DAVENPORT)
    k_int = int(k)  # type: ignore[arg-type]
    if invariant == "sd":
        if level == 1:
            return InvariantQuery(group=group, kind=KIND_SD, k=k_int)
        return InvariantQuery(group=group, kind=KIND_SD_LEVEL, k=k_int, level=level)
    if invariant == "olson":
        return InvariantQuery(group=group, kind=KIND_OLSON, k=k_int)
    return InvariantQuery(group=group, kind=KIND_LITTLE_OLSON, k=k_int)


def _expectation(
    group: GroupSpec, invariant: str, k: float | None, level: int
) -> tuple[int, int | None, str] | None:
    """Catalog expectation as (value, upper, status), or None."""
    if invariant == "sd" and level != 1:
        return None
    shift = 0
    if invariant == "davenport":
        kind, sd_k = CATALOG_DAVENPORT, None
    elif invariant == "small-davenport":
        kind, sd_k = CATALOG_SMALL_DAVENPORT, None
    elif k is not None and math.isinf(k):
        kind = CATALOG_SMALL_DAVENPORT if invariant == "ol" else CATALOG_DAVENPORT
        sd_k = None
    else:
        kind = CATALOG_SD
        if invariant == "sd":
            sd_k = int(k)  # type: ignore[arg-type]
        else:
            sd_k = int(k) + 1  # type: ignore[arg-type]
            if invariant == "ol":
                shift = -1
    rec = lookup(group, kind, sd_k)
    if rec is not None:
        upper = rec.upper + shift if rec.upper is not None else None
        return (rec.value + shift, upper, rec.status)
    predicted = predict(group, kind, sd_k)
    if predicted is not None:
        return (predicted[0] + shift, None, predicted[1])
    return None


def _expectation_matches(value: int, expectation: tuple[int, int | None, str]) -> bool:
    expected, upper, status = expectation
    if status == STATUS_EXACT:
        return value == expected
    top = upper if upper is not None else value
    return expected <= value <= top


def _print_json(payload) -> None:
    print(json.dumps(payload, indent=2))


def _csv_out(header: list[str], rows: list[list]) -> None:
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)


def _write_certificate(cert: Certificate, path: Path) -> None:
    path.write_text(cert.to_json_text())


# ---------------------------------------------------------------------------
# compute


def _require_budgeted_k(args, parser: argparse.ArgumentParser) -> None:
    if args.invariant in BUDGETED_INVARIANTS and args.k is None:
        parser.error(f"--k is required for --invariant {args.invariant}")
    if args.level < 1:
        parser.error("--level must be at least 1")
    if args.level > 1 and args.invariant != "sd":
        parser.error("--level applies to --invariant sd only")


def cmd_compute(args, parser: argparse.ArgumentParser) -> int:
    _require_budgeted_k(args, parser)
    group = make_group(args.group)
    query = _engine_query(group, args.invariant, args.k, args.level)
    config = SearchConfig(
        worker_count=_worker_count(args), time_budget=args.budget
    )
    try:
        result = compute(query, config)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    expectation = _expectation(group, args.invariant, args.k, args.level)
    comparable = result.exact and expectation is not None
    firm = comparable and expectation[2] != STATUS_PREDICTION
    matches = _expectation_matches(result.value, expectation) if comparable else None

    cert_path = None
    if args.cert is not None and result.witness is not None:
        _write_certificate(result.witness, args.cert)
        cert_path = str(args.cert)

    if args.format == "json":
        payload = {
            "group": list(group.moduli),
            "canonical": list(group.canonical_moduli),
            "order": group.size,
            "invariant": args.invariant,
            "k": _k_json(args.k),
            "level": args.level,
            "value": result.value,
            "exact": result.exact,
            "node_count": result.node_count,
            "elapsed_seconds": round(result.elapsed, 6),
            "catalog": None,
            "certificate": None,
            "certificate_path": cert_path,
        }
        if expectation is not None:
            payload["catalog"] = {
                "value": expectation[0],
                "upper": expectation[1],
                "status": expectation[2],
                "match": matches,
            }
        if result.witness is not None:
            payload["certificate"] = json.loads(result.witness.to_json_text())
        _print_json(payload)
    elif args.format == "csv":
        expected, status = "", ""
        if expectation is not None:
            expected, status = expectation[0], expectation[2]
        _csv_out(
            ["group", "invariant", "k", "level", "value", "exact", "nodes",
             "elapsed_seconds", "expected", "expected_status", "match"],
            [[
                _moduli_text(group.moduli), args.invariant, _k_text(args.k),
                args.level, result.value, result.exact, result.node_count,
                f"{result.elapsed:.6f}", expected, status,
                "" if matches is None else matches,
            ]],
        )
    else:
        print(f"group: {_group_label(group.moduli)} (order {group.size})")
        if group.canonical_moduli != group.moduli:
            print(f"canonical moduli: {_moduli_text(group.canonical_moduli)}")
        detail = f"invariant: {args.invariant}"
        if args.invariant in BUDGETED_INVARIANTS:
            detail += f", k={_k_text(args.k)}"
        if args.invariant == "sd":
            detail += f", level={args.level}"
        print(detail)
        print(f"value: {result.value}")
        print(f"exact: {'yes' if result.exact else 'no (time budget hit; lower bound)'}")
        print(f"nodes: {result.node_count}")
        print(f"elapsed: {result.elapsed:.3f}s")
        if expectation is not None:
            expected, upper, status = expectation
            shown = f"{expected}" if upper is None else f"{expected}..{upper}"
            if not result.exact:
                print(f"catalog: expected {shown} ({status})")
            elif status == STATUS_PREDICTION:
                note = "agrees" if matches else "differs"
                print(f"catalog: predicted {shown} ({note})")
            else:
                marker = "MATCH" if matches else "MISMATCH"
                print(f"catalog: expected {shown} ({status}) -- {marker}")
        if result.witness is not None:
            claims = result.witness.claims
            print(
                f"witness: length {claims.length}, "
                f"cm_{claims.cm_level}(S) = {claims.cm_value}"
            )
            print(f"  {_render_entries(result.witness)}")
        if cert_path is not None:
            print(f"certificate written: {cert_path}")

    if not result.exact:
        return EXIT_BUDGET
    if firm and not matches:
        return EXIT_MISMATCH
    return EXIT_OK


# ---------------------------------------------------------------------------
# bound


def _bound_reports(
    group: GroupSpec, k: int, method: str, level: int
) -> list[BoundReport]:
    moduli = group.canonical_moduli
    rank = group.rank
    if method == "auto":
        return [compose_bounds(group, k)]
    if method == "cyclic":
        if rank != 1:
            raise ValueError("method cyclic needs a cyclic group of order >= 2")
        return [builders.cyclic_standard(moduli[0], k, level)]
    if method == "add-cyclic":
        if rank < 2:
            raise ValueError("method add-cyclic needs rank >= 2")
        prefix = make_group(moduli[:-1])
        top = moduli[-1]
        base = compose_bounds(prefix, k + 1)
        if base.certificate is None:
            raise BuilderError(
                f"no base certificate available over {_group_label(prefix.moduli)}"
            )
        block = min(top, prefix.size - 1)
        if block < 2:
            raise ValueError("method add-cyclic needs a base group of order >= 3")
        return [builders.add_cyclic(base.certificate, top, block, k)]
    if method == "rank2":
        if rank != 3:
            raise ValueError("method rank2 needs exactly three moduli")
        base = builders.sd_square_witness(moduli[0], k)
        return [builders.add_rank2_block(base, moduli[1], moduli[2], k)]
    if method == "rank3":
        if rank != 4:
            raise ValueError("method rank3 needs exactly four moduli")
        base = builders.cyclic_standard(moduli[0], k + 3, 1)
        triple = builders._pick_triple(base.certificate.to_zseq(), k)
        return [
            builders.add_rank3_block(
                base.certificate, triple, moduli[1], moduli[2], moduli[3], k
            )
        ]
    if method == "homocyclic":
        if rank < 3 or not group.is_homocyclic:
            raise ValueError("method homocyclic needs C_n^r with r >= 3")
        return [builders.homocyclic_bound(group.exponent, rank, k)]
    if method == "selfridge25k":
        wanted = 25 * k * (k + 1) // 2
        if k < 1 or moduli != (wanted,):
            raise ValueError(
                f"method selfridge25k with --k {k} applies to the cyclic group "
                f"of order {25 * max(k, 1) * (max(k, 1) + 1) // 2}"
            )
        return [builders.selfridge_25k(k)]
    if method == "classical":
        if rank != 1:
            raise ValueError("method classical needs a cyclic group")
        reports = builders._m_classical(group, k)
        if not reports:
            raise ValueError("method classical needs a cyclic group of order >= 4")
        return reports
    raise ValueError(f"unknown method {method!r}")


def cmd_bound(args, parser: argparse.ArgumentParser) -> int:
    if args.k is None or math.isinf(args.k):
        parser.error("bound requires a finite --k")
    if args.level < 1:
        parser.error("--level must be at least 1")
    if args.level > 1 and args.method != "cyclic":
        parser.error("--level applies to --method cyclic only")
    group = make_group(args.group)
    k = int(args.k)
    try:
        reports = _bound_reports(group, k, args.method, args.level)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BuilderError, EngineError) as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION

    reports = sorted(reports, key=lambda rep: (-rep.bound, rep.method))
    best = reports[0]
    if best.certificate is not None:
        verdict = verify(best.certificate)
        if not verdict.accepted:
            for reason in verdict.reasons:
                print(f"construction failed: {reason}", file=sys.stderr)
            return EXIT_CONSTRUCTION

    cert_path = None
    if args.cert is not None and best.certificate is not None:
        _write_certificate(best.certificate, args.cert)
        cert_path = str(args.cert)

    if args.format == "json":
        payload = {
            "group": list(group.moduli),
            "canonical": list(group.canonical_moduli),
            "k": k,
            "method": args.method,
            "selected_method": best.method,
            "bound": best.bound,
            "reports": [
                {"method": rep.method, "bound": rep.bound, "trace": rep.trace}
                for rep in reports
            ],
            "certificate": None,
            "certificate_path": cert_path,
        }
        if best.certificate is not None:
            payload["certificate"] = json.loads(best.certificate.to_json_text())
        _print_json(payload)
    elif args.format == "csv":
        _csv_out(
            ["group", "k", "method", "bound", "selected"],
            [
                [_moduli_text(group.moduli), k, rep.method, rep.bound, rep is best]
                for rep in reports
            ],
        )
    else:
        print(f"group: {_group_label(group.moduli)} (order {group.size})")
        print(f"k: {k}")
        print(f"method: {best.method}")
        print(f"bound: {best.bound}")
        for rep in reports[1:]:
            print(f"also evaluated: {rep.method} = {rep.bound}")
        if best.certificate is not None:
            claims = best.certificate.claims
            print(
                f"certificate: length {claims.length}, kind {claims.kind}, "
                f"cm_{claims.cm_level}(S) = {claims.cm_value}, verified"
            )
            print(f"  {_render_entries(best.certificate)}")
        print("trace:")
        for line in best.trace.splitlines():
            print(f"  {line}")
        if cert_path is not None:
            print(f"certificate written: {cert_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, parser: argparse.ArgumentParser) -> int:
    try:
        text = args.path.read_text()
    except OSError as exc:
        print(f"error: cannot read {args.path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cert = Certificate.from_json_text(text)
    except CertificateFormatError as exc:
        print(f"error: malformed certificate: {exc}", file=sys.stderr)
        return EXIT_USAGE

    verdict = verify(cert)
    if args.format == "json":
        _print_json(
            {
                "path": str(args.path),
                "accepted": verdict.accepted,
                "reasons": list(verdict.reasons),
                "certificate": json.loads(cert.to_json_text()),
            }
        )
    else:
        claims = cert.claims
        print(
            f"certificate: {_group_label(cert.moduli)}, kind {claims.kind}, "
            f"length {claims.length}, cm_{claims.cm_level}(S) = {claims.cm_value}"
        )
        if verdict.accepted:
            print("accepted")
        else:
            print("rejected:")
            for reason in verdict.reasons:
                print(f"  - {reason}")
    return EXIT_OK if verdict.accepted else EXIT_REJECTED


# ---------------------------------------------------------------------------
# table


def _table_groups(args, parser: argparse.ArgumentParser) -> list[tuple[int, ...]]:
    groups: list[tuple[int, ...]] = []
    for moduli in args.group or []:
        if moduli not in groups:
            groups.append(moduli)
    if (args.n_range is None) != (args.r_range is None):
        parser.error("--n-range and --r-range must be given together")
    if args.n_range is not None:
        n_lo, n_hi = args.n_range
        r_lo, r_hi = args.r_range
        if n_lo < 2:
            parser.error("--n-range needs moduli >= 2")
        for r in range(r_lo, r_hi + 1):
            for n in range(n_lo, n_hi + 1):
                moduli = (n,) * r
                if moduli not in groups:
                    groups.append(moduli)
    if not groups:
        parser.error("table needs --group or --n-range with --r-range")
    return groups


def cmd_table(args, parser: argparse.ArgumentParser) -> int:
    groups = _table_groups(args, parser)
    invariants = [args.invariant] if args.invariant else ["olson", "sd"]
    workers = _worker_count(args)
    rows: list[dict] = []
    mismatch = False
    for moduli in groups:
        group = make_group(moduli)
        for invariant in invariants:
            k = args.k if invariant in BUDGETED_INVARIANTS else None
            query = _engine_query(group, invariant, k, 1)
            config = SearchConfig(worker_count=workers, time_budget=args.budget)
            try:
                result = compute(query, config)
            except EngineError as exc:
                print(f"error: {exc}", file=sys.stderr)
                return EXIT_USAGE
            expectation = _expectation(group, invariant, k, 1)
            expected_text = ""
            if expectation is not None:
                expected, upper, status = expectation
                expected_text = f"{expected}" if upper is None else f"{expected}..{upper}"
                if status == STATUS_PREDICTION:
                    expected_text += " (predicted)"
            if not result.exact:
                status_text = f"SKIPPED(lower_bound={result.value})"
            elif expectation is None:
                status_text = "NO-REFERENCE"
            elif expectation[2] == STATUS_PREDICTION:
                status_text = "NO-REFERENCE"
            elif _expectation_matches(result.value, expectation):
                status_text = "MATCH"
            else:
                status_text = "MISMATCH"
                mismatch = True
            rows.append(
                {
                    "group": _moduli_text(group.moduli),
                    "invariant": invariant,
                    "computed": result.value,
                    "expected": expected_text,
                    "status": status_text,
                    "elapsed": f"{result.elapsed:.2f}",
                }
            )

    header = ["group", "invariant", "computed", "expected", "status", "elapsed"]
    if args.format == "json":
        _print_json(rows)
    elif args.format == "human":
        widths = {
            name: max(len(name), *(len(str(row[name])) for row in rows))
            for name in header
        }
        print("  ".join(name.ljust(widths[name]) for name in header))
        for row in rows:
            print("  ".join(str(row[name]).ljust(widths[name]) for name in header))
    else:
        _csv_out(header, [[row[name] for name in header] for row in rows])
    return EXIT_MISMATCH if mismatch else EXIT_OK


# ---------------------------------------------------------------------------
# catalog


def cmd_catalog(args, parser: argparse.ArgumentParser) -> int:
    records = all_records()
    if args.group is not None:
        wanted = make_group(args.group).canonical_moduli
        records = tuple(rec for rec in records if rec.moduli == wanted)
    if args.format == "json":
        _print_json(
            [
                {
                    "moduli": list(rec.moduli),
                    "kind": rec.kind,
                    "k": rec.k,
                    "value": rec.value,
                    "upper": rec.upper,
                    "status": rec.status,
                    "provenance": rec.provenance,
                }
                for rec in records
            ]
        )
        return EXIT_OK
    if args.format == "human":
        for rec in records:
            shown = f"{rec.value}" if rec.upper is None else f"{rec.value}..{rec.upper}"
            print(
                f"{_group_label(rec.moduli)}: {rec.kind} k={rec.k} -> {shown} "
                f"({rec.status}; {rec.provenance})"
            )
        return EXIT_OK
    if args.group is None:
        sys.stdout.write(dump_csv())
        return EXIT_OK
    _csv_out(
        ["moduli", "kind", "k", "value", "upper", "status", "provenance"],
        [
            [
                _moduli_text(rec.moduli), rec.kind,
                "" if rec.k is None else rec.k, rec.value,
                "" if rec.upper is None else rec.upper, rec.status, rec.provenance,
            ]
            for rec in records
        ],
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point


_DISPATCH = {
    "compute": cmd_compute,
    "bound": cmd_bound,
    "verify": cmd_verify,
    "table": cmd_table,
    "catalog": cmd_catalog,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _DISPATCH[args.subcommand](args, parser)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
