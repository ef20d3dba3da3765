"""Command-line entry point: ``pedigrad <command> ...``.

Exit codes: 0 success, 1 a yes/no question answered "no", 2 unparsable
input, 3 input that parses but is invalid, 4 a search budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from . import analysis
from .genome_env import AlignmentStudy, Diploid, Word, WordError
from .icm_algebra import BudgetExceededError
from .io import ParseError, ValidationError, data_path, load_alignment, load_chromology
from .preorder_segments import SegmentError, parse_segment
from .recombination import Chromology, Cone, Descriptor, check_scheme

EXIT_OK, EXIT_NO, EXIT_PARSE, EXIT_INVALID, EXIT_BUDGET = 0, 1, 2, 3, 4
BUDGET_ENV = "PEDIGRAD_BUDGET"


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


@dataclass
class CliConfig:
    alignment: Path
    chromology: Path
    threshold: Optional[str]
    budget: int
    output_format: str


def _budget(args: argparse.Namespace) -> int:
    if args.budget is not None:
        value = args.budget
    elif os.environ.get(BUDGET_ENV):
        raw = os.environ[BUDGET_ENV]
        try:
            value = int(raw)
        except ValueError:
            raise CliError(EXIT_PARSE, f"{BUDGET_ENV}={raw!r} is not an integer") from None
    else:
        value = analysis.DEFAULT_SUBSET_BUDGET
    if value < 1:
        raise CliError(EXIT_INVALID, f"subset budget must be at least 1, got {value}")
    return value


def _config(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        Path(args.alignment) if args.alignment else data_path("corpus_alignment.tsv"),
        Path(args.chromology) if args.chromology else data_path("corpus_chromology.json"),
        args.threshold,
        _budget(args),
        args.format,
    )


def _load(cfg: CliConfig) -> tuple[AlignmentStudy, Chromology]:
    for p in (cfg.alignment, cfg.chromology):
        if not p.is_file():
            raise CliError(EXIT_PARSE, f"{p}: no such file")
    chromology = load_chromology(cfg.chromology)
    study = load_alignment(cfg.alignment, chromology.preorder, cfg.threshold)
    return study, chromology


def _cone(chromology: Chromology, cone_id: str) -> Cone:
    try:
        return chromology.cone(cone_id)
    except KeyError:
        known = ", ".join(c.id for c in chromology.cones)
        raise CliError(EXIT_INVALID, f"unknown cone id {cone_id!r} (known: {known})") from None


def _names(study: AlignmentStudy, text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    unknown = [n for n in names if n not in study.genotypes]
    if unknown:
        raise CliError(EXIT_INVALID, f"unknown genotype name(s): {', '.join(unknown)}")
    return names


def parse_diploid(text: str, cone: Cone, study: AlignmentStudy) -> Diploid:
    """Read ``WORD/WORD`` on the peak of ``cone``; spaces are ignored."""
    compact = "".join(text.split())
    parts = compact.split("/")
    if len(parts) != 2 or not all(parts):
        raise CliError(EXIT_PARSE, f"malformed diploid literal {text!r}; expected WORD/WORD")
    try:
        return Diploid(
            *(Word.from_full(cone.peak, study.threshold, w, study.alphabet) for w in parts)
        )
    except WordError as exc:
        raise CliError(EXIT_INVALID, f"diploid {text!r}: {exc}") from None


def _emit(cfg: CliConfig, payload: dict, text: str) -> None:
    if cfg.output_format == "json":
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
    else:
        sys.stdout.write(text + "\n")


def cmd_validate(cfg: CliConfig, args) -> int:
    study, chromology = _load(cfg)
    report = check_scheme(chromology, Descriptor.FE, study.threshold)
    payload = {
        "genotypes": len(study.genotypes),
        "base_segment": study.base_segment.literal(),
        "threshold": study.threshold,
        "cones": [c.id for c in chromology.cones],
        "scheme": report.ok,
        "scheme_approximate": report.approximate,
        "violations": [str(v) for v in report.violations],
    }
    text = "\n".join(
        [
            f"alignment {cfg.alignment.name}: {len(study.genotypes)} genotypes on {study.base_segment.literal()}",
            f"chromology {cfg.chromology.name}: cones {', '.join(payload['cones']) or '(none)'}",
            f"recombination scheme {'yes' if report.ok else 'no'}"
            + (" (bounded check)" if report.approximate else ""),
        ]
        + [f"  {v}" for v in payload["violations"]]
    )
    if not report.ok:
        sys.stderr.write(text + "\n")
        return EXIT_INVALID
    _emit(cfg, payload, text)
    return EXIT_OK


def cmd_haplotype(cfg: CliConfig, args) -> int:
    study, chromology = _load(cfg)
    cone = _cone(chromology, args.cone)
    names = _names(study, args.sum)
    h = analysis.class_of_sum(study, cone, names)
    payload = {"cone": cone.id, "sum": names, "haplotype": h.sorted_strings()}
    _emit(cfg, payload, f"{'+'.join(names)} under {cone.id}: {h}")
    return EXIT_OK


def cmd_equal(cfg: CliConfig, args) -> int:
    study, chromology = _load(cfg)
    cone = _cone(chromology, args.cone)
    left, right = _names(study, args.left), _names(study, args.right)
    hl = analysis.class_of_sum(study, cone, left)
    hr = analysis.class_of_sum(study, cone, right)
    same = hl == hr
    payload = {
        "cone": cone.id,
        "left": {"sum": left, "haplotype": hl.sorted_strings()},
        "right": {"sum": right, "haplotype": hr.sorted_strings()},
        "congruent": same,
    }
    _emit(cfg, payload, "true" if same else "false")
    return EXIT_OK if same else EXIT_NO


def cmd_localize(cfg: CliConfig, args) -> int:
    study, _ = _load(cfg)
    n = study.base_segment.domain_size
    if not 0 <= args.max_black <= n:
        raise CliError(EXIT_INVALID, f"--max-black must lie in 0..{n}")
    found = analysis.minimize_markers(study, args.max_black, smallest_only=args.smallest)
    rows = [
        {"positions": list(analysis.black_positions(s, study.threshold)), "segment": s.literal()}
        for s in found
    ]
    text = "\n".join(
        f"{','.join(map(str, r['positions'])) or '-'}\t{r['segment']}" for r in rows
    ) or "no separating marker set"
    _emit(cfg, {"max_black": args.max_black, "marker_sets": rows}, text)
    return EXIT_OK


def cmd_separate(cfg: CliConfig, args) -> int:
    study, chromology = _load(cfg)
    try:
        target = parse_segment(args.target, chromology.preorder)
    except SegmentError as exc:
        raise CliError(EXIT_PARSE, f"--target: {exc}") from None
    try:
        report = analysis.separation_check(study, target, analysis.Projection(args.projection))
    except analysis.NoMorphismError as exc:
        raise CliError(EXIT_INVALID, str(exc)) from None
    _emit(cfg, report.to_dict(), report.render_text())
    return EXIT_OK if report.separated else EXIT_NO


def cmd_predict(cfg: CliConfig, args) -> int:
    study, chromology = _load(cfg)
    cone = _cone(chromology, args.cone)
    query = [parse_diploid(d, cone, study) for d in args.diploid]
    report = analysis.predict(study, chromology, cone.id, query, cfg.budget)
    _emit(cfg, report.to_dict(), report.render_text())
    return EXIT_OK


def cmd_fibers(cfg: CliConfig, args) -> int:
    study, chromology = _load(cfg)
    cone = _cone(chromology, args.cone)
    names = _names(study, args.sum)
    cls = analysis.class_of_sum(study, cone, names)
    report = analysis.fiber_components(study, chromology, cone.id, cls, cfg.budget)
    _emit(cfg, report.to_dict(), report.render_text())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pedigrad",
        description="Haplotype classes, marker localization and phenotype prediction on aligned diploids.",
    )
    parser.add_argument("--alignment", help="alignment TSV (default: bundled example corpus)")
    parser.add_argument("--chromology", help="chromology JSON (default: bundled rho/rho_prime)")
    parser.add_argument("--threshold", help="truncation threshold, overriding the alignment file")
    parser.add_argument("--budget", type=int, help=f"subset budget (default 25, or ${BUDGET_ENV})")
    parser.add_argument("--format", choices=("text", "json"), default="text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and check both input files")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("haplotype", help="haplotype tuple of a sum of genotypes")
    p.add_argument("--cone", required=True)
    p.add_argument("--sum", required=True, help="comma-separated genotype names")
    p.set_defaults(func=cmd_haplotype)

    p = sub.add_parser("equal", help="whether two sums have the same haplotype")
    p.add_argument("--cone", required=True)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(func=cmd_equal)

    p = sub.add_parser("localize", help="inclusion-minimal separating marker sets")
    p.add_argument("--max-black", type=int, required=True)
    p.add_argument("--smallest", action="store_true", help="only the sets of least size")
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("separate", help="separation check at one target segment")
    p.add_argument("--target", required=True, help="segment literal, e.g. (1:0)(1:1)(16:0)")
    p.add_argument("--projection", choices=[x.value for x in analysis.Projection], default="both")
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("predict", help="lift a query haplogroup through the study")
    p.add_argument("--cone", required=True)
    p.add_argument("--diploid", action="append", required=True, help="WORD/WORD, repeatable")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("fibers", help="phenotype components of the fiber of a sum")
    p.add_argument("--cone", required=True)
    p.add_argument("--sum", required=True)
    p.set_defaults(func=cmd_fibers)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    try:
        cfg = _config(args)
        return args.func(cfg, args)
    except CliError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return exc.code
    except ParseError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    except (ValidationError, analysis.UnrealizableClassError, analysis.NoMorphismError) as exc:
        sys.stderr.write(f"invalid: {exc}\n")
        return EXIT_INVALID
    except BudgetExceededError as exc:
        sys.stderr.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
