from __future__ import annotations

import argparse
import sys
from typing import Callable, List, Optional

from .atlas import dump_triangulation
from .audit import audit_event, configure_logging, get_logger
from .codes import (
    are_equivalent,
    dual,
    enumerate_self_dual_classes,
    is_doubly_even,
    is_self_dual,
    parse_code,
    weight_enumerator,
)
from .config import EngineSettings
from .errors import EXIT_CONSISTENCY, EXIT_INPUT, EXIT_OK, EXIT_PRECONDITION, InputError, InvolcodeError
from .report import (
    CodeOut,
    CodeReport,
    extraction_rows,
    render_json,
    render_table,
    validation_rows,
)
from .service import ExtractionService

log = get_logger("cli")

Handler = Callable[[argparse.Namespace, ExtractionService], int]


class _Parser(argparse.ArgumentParser):
    # Usage errors are input errors in the exit-code contract.
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Print the machine-readable report")
    common.add_argument("--max-subdiv", type=int, default=None, help="Subdivision budget for regularization")
    common.add_argument("--sparse-threshold", type=float, default=None, help="Density at or below which elimination goes sparse")
    common.add_argument("--no-collapse", action="store_true", help="Skip free-face collapses before homology")
    common.add_argument("--log-level", default="warning", help="stderr log level (debug, info, warning, error)")
    common.add_argument("--audit-log", default=None, help="Append JSONL audit events to this file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="involcode", description="Self-dual codes of involutions on triangulated 3-manifolds")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("validate", parents=[common], help="Check manifold, involution and isolation")
    p.add_argument("input", help="Triangulation file or atlas entry name")
    p.set_defaults(handler=cmd_validate)

    p = commands.add_parser("extract", parents=[common], help="Compute the code of an involution")
    p.add_argument("input", help="Triangulation file or atlas entry name")
    p.add_argument("--timings", action="store_true", help="Include per-stage timings in the report")
    p.add_argument("--extra-subdiv", type=int, default=0, help="Extra barycentric subdivisions after regularization")
    p.set_defaults(handler=cmd_extract)

    p = commands.add_parser("code", help="Binary code toolkit")
    code_commands = p.add_subparsers(dest="code_command", required=True)
    for name, helptext in (
        ("dual", "Dual code"),
        ("self-dual", "Is the code self-dual"),
        ("doubly-even", "Is the code doubly even"),
        ("enumerator", "Weight enumerator"),
    ):
        q = code_commands.add_parser(name, parents=[common], help=helptext)
        q.add_argument("code", help="Known code name or comma-separated generator bitstrings")
        q.set_defaults(handler=cmd_code)
    q = code_commands.add_parser("equiv", parents=[common], help="Permutation equivalence of two codes")
    q.add_argument("code", help="First code")
    q.add_argument("other", help="Second code")
    q.set_defaults(handler=cmd_code)
    q = code_commands.add_parser("enumerate", parents=[common], help="Self-dual codes of length n up to equivalence")
    q.add_argument("length", type=int, help="Even length, at most 10")
    q.set_defaults(handler=cmd_code)

    p = commands.add_parser("atlas", help="Built-in examples")
    atlas_commands = p.add_subparsers(dest="atlas_command", required=True)
    q = atlas_commands.add_parser("list", parents=[common], help="List atlas entries")
    q.set_defaults(handler=cmd_atlas)
    q = atlas_commands.add_parser("emit", parents=[common], help="Write an atlas entry as a triangulation file")
    q.add_argument("name", help="Atlas entry name")
    q.add_argument("path", help="Output path")
    q.set_defaults(handler=cmd_atlas)
    return parser


def cmd_validate(args: argparse.Namespace, service: ExtractionService) -> int:
    report = service.validate(args.input)
    print(render_json(report) if args.json else render_table(validation_rows(report)))
    return EXIT_OK if report.ok else EXIT_PRECONDITION


def cmd_extract(args: argparse.Namespace, service: ExtractionService) -> int:
    if args.extra_subdiv < 0:
        raise InputError(f"--extra-subdiv must be >= 0, got {args.extra_subdiv}")
    report = service.extract(args.input, extra_subdivisions=args.extra_subdiv, timings=args.timings)
    print(render_json(report) if args.json else render_table(extraction_rows(report)))
    return EXIT_OK


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def cmd_code(args: argparse.Namespace, service: ExtractionService) -> int:
    settings = service.settings
    command = args.code_command
    report = CodeReport(command=command)
    lines: List[str] = []

    if command == "enumerate":
        classes = enumerate_self_dual_classes(args.length, settings)
        for i, code in enumerate(classes):
            enum = weight_enumerator(code, settings)
            report.codes.append(CodeOut.from_code(code, enum))
            flag = "doubly-even" if is_doubly_even(code) else "singly-even"
            lines.append(f"class {i}: {flag:<12} {enum.as_polynomial():<28} {' '.join(code.bitstrings()) or '-'}")
        lines.insert(0, f"{len(classes)} classes of self-dual codes of length {args.length}")
    elif command == "equiv":
        a, b = parse_code(args.code), parse_code(args.other)
        perm = are_equivalent(a, b, settings)
        report.codes.extend([CodeOut.from_code(a), CodeOut.from_code(b)])
        report.verdict = perm is not None
        report.permutation = list(perm) if perm is not None else None
        lines.append(f"equivalent {list(perm)}" if perm is not None else "not equivalent")
    else:
        code = parse_code(args.code)
        if command == "dual":
            d = dual(code)
            report.codes.append(CodeOut.from_code(d))
            lines.extend(d.bitstrings() or [f"(zero code of length {d.length})"])
        elif command == "self-dual":
            report.codes.append(CodeOut.from_code(code))
            report.verdict = is_self_dual(code)
            lines.append(f"self-dual: {_yes_no(report.verdict)}")
        elif command == "doubly-even":
            report.codes.append(CodeOut.from_code(code))
            report.verdict = is_doubly_even(code)
            lines.append(f"doubly-even: {_yes_no(report.verdict)}")
        else:
            enum = weight_enumerator(code, settings)
            report.codes.append(CodeOut.from_code(code, enum))
            lines.append(enum.as_polynomial())

    print(render_json(report) if args.json else "\n".join(lines))
    return EXIT_OK


def cmd_atlas(args: argparse.Namespace, service: ExtractionService) -> int:
    if args.atlas_command == "list":
        report = service.atlas_listing()
        if args.json:
            print(render_json(report))
        else:
            for entry in report.entries:
                expected = f"k={entry.k} code={entry.code_name or '-'} maximal={_yes_no(bool(entry.maximal))}"
                print(f"{entry.name:<20}{expected:<44}{entry.description}")
        return EXIT_OK

    entry = service.registry.create(args.name)
    c, tau = entry.build()
    path = dump_triangulation(c, tau, args.path)
    print(str(path))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = EngineSettings.from_env().with_overrides(
            max_subdivisions=args.max_subdiv,
            sparse_threshold=args.sparse_threshold,
            collapse=False if args.no_collapse else None,
            audit_log=args.audit_log,
        )
        configure_logging(args.log_level, settings.audit_log)
        status = args.handler(args, ExtractionService(settings))
    except InvolcodeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        audit_event(log, "command_failed", command=args.command, exit_code=exc.exit_code, **exc.to_dict())
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001
        log.exception("internal error")
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    audit_event(log, "command_done", command=args.command, exit_code=status)
    return status


if __name__ == "__main__":
    raise SystemExit(main())
