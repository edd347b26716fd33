"""Command-line entry point: scan, forge, verify, matrix."""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .extractors import AliasTable
from .forge import FixtureSpec, OutputNotEmpty, canonical_spec, fixture_paths, forge_device, verify_fixture
from .ingest import UnreadableRoot
from .model import AppId, OsKind, TaxonomyCategory
from .pipeline import scan_image
from .reportgen import (
    FORMATS,
    REFERENCES,
    CaseReport,
    build_matrix,
    compare_matrix,
    reference_finding,
    serialize,
)

EXIT_OK = 0
EXIT_FATAL = 1
EXIT_PARTIAL = 2

log = logging.getLogger("imtriage")


def _csv_list(choices):
    def parse(text: str) -> list[str]:
        items = [t.strip().lower() for t in text.split(",") if t.strip()]
        bad = [t for t in items if t not in choices]
        if bad:
            raise argparse.ArgumentTypeError(f"unknown value(s) {bad}; choose from {sorted(choices)}")
        return items

    return parse


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="imtriage", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="repeat for more log output")
    sub = parser.add_subparsers(dest="command", required=True)

    apps = {a.value for a in AppId}

    scan = sub.add_parser("scan", help="extract artifacts from an image directory")
    scan.add_argument("--input", required=True, type=Path, help="extracted file-system image (read only)")
    scan.add_argument("--out", required=True, type=Path, help="report directory, created if absent")
    scan.add_argument("--os", choices=("auto", "ios", "android"), default="auto")
    scan.add_argument("--apps", type=_csv_list(apps), default=None, help="comma list, default all")
    scan.add_argument(
        "--format",
        type=_csv_list(set(FORMATS) | {"summary"}),
        default=list(FORMATS),
        help="comma list of json,csv,timeline,summary (default json,csv,timeline)",
    )
    scan.add_argument("--aliases", type=Path, default=None, help="INI file of per-app table/column aliases")
    scan.add_argument("--workers", type=int, default=None, help=argparse.SUPPRESS)

    forge = sub.add_parser("forge", help="synthesize a fixture image with ground truth")
    forge.add_argument("--out", required=True, type=Path, help="empty or absent directory")
    forge.add_argument("--os", choices=("ios", "android"), default="ios")
    forge.add_argument("--profile", choices=("filesystem", "logical"), default="filesystem")
    forge.add_argument("--seed", type=int, default=2013)
    forge.add_argument("--spec", type=Path, default=None, help="FixtureSpec as JSON (overrides --os/--profile/--seed)")

    verify = sub.add_parser("verify", help="check a fixture tree against its manifest")
    verify.add_argument("--input", required=True, type=Path, help="forge output directory or image tree")
    verify.add_argument("--manifest", type=Path, default=None, help="default: <input>/manifest.json")

    matrix = sub.add_parser("matrix", help="recoverability matrix versus the published reference")
    matrix.add_argument("--input", required=True, type=Path)
    matrix.add_argument("--os", choices=("auto", "ios", "android"), default="auto")
    matrix.add_argument("--profile", choices=("filesystem", "logical"), default=None,
                        help="acquisition profile of the reference (default: filesystem on iOS, logical on Android)")
    matrix.add_argument("--aliases", type=Path, default=None)
    return parser


def _setup_logging(verbosity: int) -> None:
    level = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO}.get(verbosity, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)


def _inside(child: Path, parent: Path) -> bool:
    child, parent = child.resolve(), parent.resolve()
    return child == parent or parent in child.parents


def _summary(report: CaseReport) -> dict:
    errors: dict[str, int] = {}
    for app, _path, _reason in report.errors:
        errors[app] = errors.get(app, 0) + 1
    return {
        "os": report.image_os.value,
        "apps": {
            app: {"records": counts, "errors": errors.get(app, 0)}
            for app, counts in report.app_counts().items()
        },
        "errors": len(report.errors),
        "warnings": len(report.warnings),
    }


def _print_summary(report: CaseReport) -> None:
    if not report.apps:
        print(f"os={report.image_os.value}: no messaging apps found")
    for app, info in _summary(report)["apps"].items():
        counts = " ".join(f"{k}={v}" for k, v in info["records"].items() if v)
        total = sum(info["records"].values())
        print(f"{app}: {total} records ({counts or 'none'}) errors={info['errors']}")


def _load_aliases(path: Path | None) -> AliasTable | None:
    return None if path is None else AliasTable.from_file(path)


def run_scan(args: argparse.Namespace) -> int:
    if not args.input.is_dir():
        print(f"error: input is not a directory: {args.input}", file=sys.stderr)
        return EXIT_FATAL
    if _inside(args.out, args.input):
        print("error: --out must be outside the input tree", file=sys.stderr)
        return EXIT_FATAL
    try:
        aliases = _load_aliases(args.aliases)
        _image, report = scan_image(
            args.input,
            os_override=None if args.os == "auto" else args.os,
            apps=args.apps,
            aliases=aliases,
            max_workers=args.workers,
        )
    except UnreadableRoot as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL

    outputs: dict[str, bytes] = {}
    for fmt in args.format:
        if fmt != "summary":
            outputs.update(serialize(report, fmt))
    args.out.mkdir(parents=True, exist_ok=True)
    for name, data in sorted(outputs.items()):
        (args.out / name).write_bytes(data)

    _print_summary(report)
    if "summary" in args.format:
        print(json.dumps(_summary(report), sort_keys=True))
    return EXIT_PARTIAL if report.errors else EXIT_OK


def run_forge(args: argparse.Namespace) -> int:
    try:
        if args.spec is not None:
            spec = FixtureSpec.from_dict(json.loads(args.spec.read_text(encoding="utf-8")))
        else:
            spec = canonical_spec(args.os, args.profile, args.seed)
        forge_device(spec, args.out)
    except OutputNotEmpty as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    _image, manifest_path = fixture_paths(args.out)
    digest = hashlib.sha256(manifest_path.read_bytes()).hexdigest()
    print(f"{manifest_path} sha256={digest}")
    return EXIT_OK


def run_verify(args: argparse.Namespace) -> int:
    tree = args.input
    manifest = args.manifest
    if manifest is None:
        image, manifest = fixture_paths(tree)
        if image.is_dir():
            tree = image
    if not manifest.is_file() or not tree.is_dir():
        print("error: fixture tree or manifest not found", file=sys.stderr)
        return EXIT_FATAL
    try:
        problems = verify_fixture(tree, manifest)
    except (OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    for problem in problems:
        print(problem)
    print(f"{len(problems)} discrepancies")
    return EXIT_PARTIAL if problems else EXIT_OK


def run_matrix(args: argparse.Namespace) -> int:
    if not args.input.is_dir():
        print(f"error: input is not a directory: {args.input}", file=sys.stderr)
        return EXIT_FATAL
    try:
        _image, report = scan_image(
            args.input, os_override=None if args.os == "auto" else args.os, aliases=_load_aliases(args.aliases)
        )
    except (UnreadableRoot, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FATAL
    profile = args.profile or ("logical" if report.image_os is OsKind.ANDROID else "filesystem")
    reference = REFERENCES.get((report.image_os, profile))
    computed = build_matrix(report)
    apps = list(AppId)
    print("category".ljust(24) + "".join(a.value.ljust(44) for a in apps))
    for category in TaxonomyCategory:
        row = category.value.ljust(24)
        for app in apps:
            got = ",".join(sorted(computed.get(app, category))) or "none"
            if reference is not None:
                ref = reference_finding(reference, app, category)
                ref = ",".join(ref).replace(",(exact)", " (exact)") if isinstance(ref, list) else ref
                got = f"{got} [ref {ref}]"
            row += got.ljust(44)
        print(row.rstrip())
    if reference is None:
        print(f"no reference for {report.image_os.value}/{profile}")
        return EXIT_OK
    problems = compare_matrix(computed, reference)
    for problem in problems:
        print(f"MISMATCH {problem}")
    print("reference holds" if not problems else f"{len(problems)} reference cells violated")
    return EXIT_PARTIAL if problems else EXIT_OK


_COMMANDS = {"scan": run_scan, "forge": run_forge, "verify": run_verify, "matrix": run_matrix}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.verbose)
    return _COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
