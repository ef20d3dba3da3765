"""Readers for alignment tables and chromology files, plus the bundled corpus.

Alignment files are tab-separated with a header row
``name  allele1  allele2  phenotypes``. Lines starting with ``#`` before the
header carry settings:

``#alphabet A,C,G,T gap=e``
    symbols allowed in alleles (required)
``#segment (3:1)(2:0)...``
    base segment literal; defaults to singleton patches colored at the threshold
``#threshold 1``
    truncation threshold, default ``1``
``#phenotypes hea,dis``
    label order; defaults to order of first appearance
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .genome_env import Alphabet, AlignmentStudy, StudyError, WordError
from .preorder_segments import BOOLEAN, PreOrder, Segment, SegmentError, parse_segment
from .recombination import Chromology, Cone, ConeError

HEADER = ("name", "allele1", "allele2", "phenotypes")

PathLike = Union[str, Path]


class ParseError(ValueError):
    """The input is not syntactically a valid file of the expected kind."""


class ValidationError(ValueError):
    """The input parses but breaks an invariant of the objects it describes."""


def parse_alignment(
    text: str,
    preorder: PreOrder = BOOLEAN,
    source: str = "<alignment>",
    threshold: Optional[str] = None,
) -> AlignmentStudy:
    """Read an alignment table; ``threshold`` overrides any ``#threshold`` line."""
    override = threshold
    alphabet: Optional[Alphabet] = None
    segment_literal: Optional[str] = None
    threshold = "1"
    labels: Optional[list[str]] = None
    header_seen = False
    rows = []
    row_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.rstrip("\r\n")
        where = f"{source}:{lineno}"
        if not line.strip():
            continue
        if line.startswith("#"):
            if header_seen:
                continue
            key, _, value = line[1:].strip().partition(" ")
            value = value.strip()
            if key == "alphabet":
                alphabet = _parse_alphabet(value, where)
            elif key == "segment":
                segment_literal = value
            elif key == "threshold":
                if not value:
                    raise ParseError(f"{where}: empty threshold")
                threshold = value
            elif key == "phenotypes":
                labels = [v.strip() for v in value.split(",") if v.strip()]
            continue
        cells = line.split("\t")
        if not header_seen:
            if tuple(c.strip() for c in cells) != HEADER:
                raise ParseError(f"{where}: expected header {' / '.join(HEADER)}")
            header_seen = True
            continue
        if len(cells) != 4:
            raise ParseError(f"{where}: expected 4 tab-separated fields, found {len(cells)}")
        name, w1, w2, phs = (c.strip() for c in cells)
        phenotypes = [p.strip() for p in phs.split(";") if p.strip()]
        if not name:
            raise ParseError(f"{where}: empty genotype name")
        if not phenotypes:
            raise ValidationError(f"{where}: row {name!r} has no phenotype")
        rows.append((name, w1, w2, phenotypes))
        row_lines.append(where)
    if override is not None:
        threshold = override
    if alphabet is None:
        raise ParseError(f"{source}: missing '#alphabet' line")
    if not header_seen:
        raise ParseError(f"{source}: missing header row")
    if threshold not in preorder:
        raise ValidationError(f"{source}: threshold {threshold!r} is not a color")
    if segment_literal is None:
        n = len(rows[0][1]) if rows else 0
        base = Segment.discrete(n, threshold, preorder)
    else:
        try:
            base = parse_segment(segment_literal, preorder)
        except SegmentError as exc:
            raise ParseError(f"{source}: #segment: {exc}") from None
    if labels is not None:
        for (name, *_, phs), where in zip(rows, row_lines):
            unknown = [p for p in phs if p not in labels]
            if unknown:
                raise ValidationError(f"{where}: row {name!r} uses undeclared phenotypes {unknown}")
    seen_names = set()
    for (name, w1, w2, _), where in zip(rows, row_lines):
        if name in seen_names:
            raise ValidationError(f"{where}: duplicate genotype name {name!r}")
        seen_names.add(name)
        for which, w in (("allele1", w1), ("allele2", w2)):
            if len(w) != base.domain_size:
                raise ValidationError(
                    f"{where}: row {name!r} {which} has length {len(w)}, expected {base.domain_size}"
                )
            bad = sorted({ch for ch in w if ch not in alphabet})
            if bad:
                raise ValidationError(f"{where}: row {name!r} {which} uses symbols {bad} outside the alphabet")
    try:
        return AlignmentStudy.from_rows(base, threshold, rows, alphabet, labels)
    except (StudyError, WordError, SegmentError) as exc:
        raise ValidationError(f"{source}: {exc}") from None


def _parse_alphabet(value: str, where: str) -> Alphabet:
    parts = value.split()
    if not parts:
        raise ParseError(f"{where}: empty alphabet")
    letters = [s.strip() for s in parts[0].split(",") if s.strip()]
    gap = "e"
    for extra in parts[1:]:
        key, eq, val = extra.partition("=")
        if key != "gap" or not eq:
            raise ParseError(f"{where}: unexpected alphabet option {extra!r}")
        gap = val
    try:
        return Alphabet(tuple(letters), gap)
    except WordError as exc:
        raise ParseError(f"{where}: {exc}") from None


def load_alignment(
    path: PathLike, preorder: PreOrder = BOOLEAN, threshold: Optional[str] = None
) -> AlignmentStudy:
    path = Path(path)
    return parse_alignment(path.read_text(encoding="utf-8"), preorder, str(path), threshold)


def parse_chromology(text: str, source: str = "<chromology>") -> Chromology:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{source}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    if not isinstance(data, dict) or "cones" not in data:
        raise ParseError(f"{source}: expected an object with a 'cones' list")
    try:
        preorder = PreOrder.from_dict(data["preorder"]) if "preorder" in data else BOOLEAN
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{source}: preorder: {exc}") from None
    cones = []
    if not isinstance(data["cones"], list):
        raise ParseError(f"{source}: 'cones' must be a list")
    for n, entry in enumerate(data["cones"], 1):
        where = f"{source}: cone #{n}"
        if not isinstance(entry, dict) or not {"id", "peak", "legs"} <= entry.keys():
            raise ParseError(f"{where}: needs 'id', 'peak' and 'legs'")
        legs = entry["legs"]
        if not isinstance(legs, list) or not all(isinstance(m, list) for m in legs):
            raise ParseError(f"{where}: 'legs' must be a list of patch-index lists")
        try:
            peak = parse_segment(str(entry["peak"]), preorder)
        except SegmentError as exc:
            raise ParseError(f"{where}: {exc}") from None
        try:
            cones.append(Cone.from_masks(str(entry["id"]), peak, legs))
        except (ConeError, SegmentError) as exc:
            raise ValidationError(f"{where}: {exc}") from None
    try:
        return Chromology(preorder, tuple(cones))
    except ConeError as exc:
        raise ValidationError(f"{source}: {exc}") from None


def load_chromology(path: PathLike) -> Chromology:
    path = Path(path)
    return parse_chromology(path.read_text(encoding="utf-8"), str(path))


def _data_text(name: str) -> str:
    return resources.files("pedigrad").joinpath("data", name).read_text(encoding="utf-8")


def example_study() -> AlignmentStudy:
    """The eighteen-genotype corpus shipped with the package."""
    return parse_alignment(_data_text("corpus_alignment.tsv"), source="corpus_alignment.tsv")


def example_chromology() -> Chromology:
    """Two three-leg cones ``rho`` and ``rho_prime`` on segments of length 18."""
    return parse_chromology(_data_text("corpus_chromology.json"), source="corpus_chromology.json")


def data_path(name: str) -> Path:
    return Path(str(resources.files("pedigrad").joinpath("data", name)))
