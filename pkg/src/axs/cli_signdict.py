"""CLI for the sign dictionary compiler: compile, validate, export-json,
and a seeded demo-dictionary generator."""

from __future__ import annotations

import argparse
import json
import sys

from .errors import PipelineError
from .landmarks import (
    DEFAULT_TRIM_THRESHOLD,
    compile_dictionary,
    export_json,
    validate_dictionary,
)
from .synth import build_demo_dictionary


def main(argv=None):
    parser = argparse.ArgumentParser(prog="axs-signdict", description="Sign dictionary tooling")
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compile", help="compile landmark JSON files into a dictionary artifact")
    c.add_argument("--in", dest="input_dir", required=True)
    c.add_argument("--out", dest="output", required=True)
    c.add_argument("--strict", action="store_true",
                   help="fail when the fingerspell alphabet is incomplete")
    c.add_argument("--trim-threshold", type=float, default=DEFAULT_TRIM_THRESHOLD)

    v = sub.add_parser("validate", help="verify an artifact's structure and checksums")
    v.add_argument("path")

    e = sub.add_parser("export-json", help="dump an artifact as inspectable JSON")
    e.add_argument("path")

    d = sub.add_parser("demo", help="generate a deterministic synthetic demo dictionary")
    d.add_argument("--out", dest="output", required=True)
    d.add_argument("--seed", type=int, default=7)

    args = parser.parse_args(argv)
    try:
        if args.command == "compile":
            report = compile_dictionary(
                args.input_dir, args.output, strict=args.strict, trim_threshold=args.trim_threshold
            )
            print(f"wrote {report.entries_written} entries to {report.output_path}")
            for gloss in report.duplicates:
                print(f"warning: duplicate gloss {gloss} (later file wins)")
            for path, err in report.failures:
                print(f"failed: {path}: {err}")
            print(report.vocabulary_note)
            print(f"fingerspell alphabet complete: {report.fingerspell_complete}")
        elif args.command == "validate":
            report = validate_dictionary(args.path)
            print(f"{report.entry_count} entries")
            for violation in report.violations:
                print(f"violation: {violation}")
            print("OK" if report.ok else "INVALID")
            if not report.ok:
                sys.exit(1)
        elif args.command == "export-json":
            json.dump(export_json(args.path), sys.stdout)
            print()
        elif args.command == "demo":
            report = build_demo_dictionary(args.output, seed=args.seed)
            print(f"wrote {report.entries_written} synthetic entries to {args.output}")
    except PipelineError as exc:
        parser.exit(2, f"error [{exc.code}]: {exc}\n")


if __name__ == "__main__":
    main()
