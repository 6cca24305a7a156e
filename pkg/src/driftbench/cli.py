"""Command-line entry point: ``driftbench manifest|generate|detect|learn|report``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from driftbench.bench import io, report as reporting, runner
from driftbench.bench.manifest import Manifest, ManifestParams, enumerate_manifest
from driftbench.detectors import REGISTRY
from driftbench.learners import DEFAULT_WINDOW


def _csv(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


def _ints(text: str) -> tuple[int, ...]:
    return tuple(int(t) for t in _csv(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="driftbench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    m = sub.add_parser("manifest", help="enumerate the benchmark grid")
    m.add_argument("--out", required=True)
    m.add_argument("--generators", default="rbf,rt")
    m.add_argument("--classes", default="2,3,5,10")
    m.add_argument("--features", default="2,5,10")
    m.add_argument("--categories")
    m.add_argument("--difficulties")
    m.add_argument("--speeds", default="S,G,I")
    m.add_argument("--affected-counts", default="2,3,5,10")
    m.add_argument("--seeds", type=int, default=1)
    m.add_argument("--base-seed", type=int, default=0)
    m.add_argument("--length", type=int, default=20_000)
    m.add_argument("--position", type=int, default=10_000)
    m.add_argument("--width", type=int, default=2_000)
    m.add_argument("--range", type=int, default=4_000)
    m.add_argument("--stationary", action="store_true", help="add stationary twins")

    g = sub.add_parser("generate", help="write stream CSVs and ground-truth sidecars")
    g.add_argument("--manifest", required=True)
    g.add_argument("--out", required=True)
    g.add_argument("--force", action="store_true")

    d = sub.add_parser("detect", help="run detectors on the error stream of a Hoeffding tree")
    d.add_argument("--streams", required=True)
    d.add_argument("--detectors", default=",".join(REGISTRY))
    d.add_argument("--range", type=int, default=None)
    d.add_argument("--out", required=True)

    le = sub.add_parser("learn", help="prequential accuracy of the learners")
    le.add_argument("--streams", required=True)
    le.add_argument("--learners", default="ht,aht,ht-dw")
    le.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    le.add_argument("--out", required=True)

    r = sub.add_parser("report", help="aggregate results into tables")
    r.add_argument("--results", required=True)
    r.add_argument("--group-by", default="detector")
    r.add_argument("--accuracy")
    r.add_argument("--out", required=True)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "manifest":
            params = ManifestParams(
                generators=tuple(_csv(args.generators)),
                classes=_ints(args.classes),
                features=_ints(args.features),
                categories=tuple(_csv(args.categories)) if args.categories else None,
                difficulties=tuple(_csv(args.difficulties)) if args.difficulties else None,
                speeds=tuple(_csv(args.speeds)),
                affected_counts=_ints(args.affected_counts),
                seeds=args.seeds,
                base_seed=args.base_seed,
                length=args.length,
                position=args.position,
                width=args.width,
                range=args.range,
                stationary=args.stationary,
            )
            manifest = enumerate_manifest(params)
            manifest.write(args.out)
            c = manifest.counts
            print(f"{c['total']} streams ({c['drifting']} drifting, {c['stationary']} stationary,"
                  f" {c['excluded']} unsampleable skipped) -> {args.out}")
        elif args.command == "generate":
            manifest = Manifest.read(args.manifest)
            ids = runner.generate_streams(manifest, args.out, force=args.force)
            print(f"generated {len(ids)} streams in {args.out}")
        elif args.command == "detect":
            rows = runner.detect(args.streams, _csv(args.detectors), args.range, args.out)
            print(f"wrote {len(rows)} result rows to {args.out}")
        elif args.command == "learn":
            rows = runner.learn(args.streams, _csv(args.learners), args.window, args.out)
            print(f"wrote {len(rows)} accuracy rows to {Path(args.out) / 'accuracy.csv'}")
        elif args.command == "report":
            results = io.read_table(args.results)
            accuracy = io.read_table(args.accuracy) if args.accuracy else None
            tables = reporting.report(results, args.group_by, args.out, accuracy)
            print(f"wrote {len(tables)} tables to {args.out}")
    except (KeyError, ValueError, FileExistsError, OSError, RuntimeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"driftbench: error: {msg}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
