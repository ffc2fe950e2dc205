"""Command-line entry point: ``respicam run | matrix | synth``.

Exit codes: 0 success, 1 other failure, 2 manifest or config error,
3 every subject failed.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .cohorts import COHORTS, get_cohort
from .config import Settings, resolve_settings
from .errors import ConfigError, ManifestError, RespicamError
from .features import DetectorKind
from .manifest import load_manifest
from .matrix import evaluate, render_report, run_matrix, write_subjects_csv
from .metrics import format_report_table
from .pipeline import PipelineConfig
from .synthgen import SynthSpec, synth_manifest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_MANIFEST = 2
EXIT_ALL_FAILED = 3


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity >= 2:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _cmd_run(args: argparse.Namespace, settings: Settings) -> int:
    try:
        cfg = PipelineConfig.from_acronym(args.config, args.detector)
    except ValueError as e:
        print(str(e), file=sys.stderr)
        return EXIT_FAILURE
    records = load_manifest(args.manifest)
    if args.subject:
        records = [r for r in records if r.id == args.subject]
        if not records:
            print(f"Subject not found: {args.subject}", file=sys.stderr)
            return EXIT_MANIFEST
    report = evaluate(records, settings=settings, jobs=args.jobs, configs=[cfg])
    for res in report.results:
        if res.ok:
            print(f"{res.subject_id}: {res.estimate_bpm:.2f} bpm (gt {res.gt_bpm:.2f})")
        else:
            print(f"{res.subject_id}: FAILED {res.error}")
    for cond, rows in report.tables.items():
        print(format_report_table(rows, title=f"[{cond.value}]"))
    if args.out:
        write_subjects_csv(report.results, args.out)
    return EXIT_ALL_FAILED if report.all_failed else EXIT_OK


def _cmd_matrix(args: argparse.Namespace, settings: Settings) -> int:
    report = run_matrix(args.manifest, args.out, settings=settings, jobs=args.jobs)
    print(render_report(report))
    return EXIT_ALL_FAILED if report.all_failed else EXIT_OK


def _cmd_synth(args: argparse.Namespace, settings: Settings) -> int:
    if args.cohort:
        cohort = get_cohort(args.cohort)
        if cohort is None:
            names = ", ".join(c.name for c in COHORTS)
            print(f"Cohort not found: {args.cohort} (known: {names})", file=sys.stderr)
            return EXIT_FAILURE
        specs = list(cohort.specs)
    elif args.rr is not None:
        specs = [
            SynthSpec(
                rr_bpm=args.rr,
                amplitude_px=args.amplitude,
                duration_s=args.duration,
                fps=args.fps,
                noise_sigma=args.noise,
                texture_seed=args.seed,
                drift_px_per_s=args.drift,
            )
        ]
    else:
        print("synth needs --rr or --cohort", file=sys.stderr)
        return EXIT_FAILURE
    path = synth_manifest(specs, args.out)
    print(f"wrote {len(specs)} clip(s), manifest {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="respicam", description="Respiratory rate from chest motion in video frames"
    )
    parser.add_argument("--config-file", default=None, help="TOML file with parameter tables")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override one parameter, e.g. flow.window=15 (repeatable)",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="one configuration over a manifest")
    run.add_argument("--manifest", required=True)
    run.add_argument("--config", required=True, help="acronym such as FLBM or SOBS")
    run.add_argument("--detector", required=True, choices=[d.value for d in DetectorKind])
    run.add_argument("--out", default=None, help="per-subject CSV")
    run.add_argument("--subject", default=None, help="only this subject id")
    run.add_argument("--jobs", type=int, default=1)

    matrix = sub.add_parser("matrix", help="all 18 configurations over a manifest")
    matrix.add_argument("--manifest", required=True)
    matrix.add_argument("--out", required=True, help="output directory")
    matrix.add_argument("--jobs", type=int, default=1)

    synth = sub.add_parser("synth", help="render synthetic clips and their manifest")
    synth.add_argument("--out", required=True, help="output directory")
    synth.add_argument("--cohort", default=None, choices=[c.name for c in COHORTS])
    synth.add_argument("--rr", type=float, default=None, help="breaths per minute")
    synth.add_argument("--duration", type=float, default=60.0)
    synth.add_argument("--fps", type=float, default=30.0)
    synth.add_argument("--amplitude", type=float, default=2.0)
    synth.add_argument("--noise", type=float, default=0.0)
    synth.add_argument("--drift", type=float, default=0.0)
    synth.add_argument("--seed", type=int, default=0)
    return parser


_COMMANDS = {"run": _cmd_run, "matrix": _cmd_matrix, "synth": _cmd_synth}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        settings = resolve_settings(args.config_file, args.overrides)
        return _COMMANDS[args.command](args, settings)
    except (ManifestError, ConfigError) as e:
        print(str(e), file=sys.stderr)
        return EXIT_MANIFEST
    except RespicamError as e:
        logger.debug("command failed", exc_info=True)
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
