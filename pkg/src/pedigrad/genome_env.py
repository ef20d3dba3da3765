"""Truncation, words with gaps, diploids and alignment studies.

A :class:`Word` only stores the symbols at the truncated positions of its
segment. Rendering pads the remaining positions with ``'-'``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional, Sequence

from .icm_algebra import AtomUniverse, IcmElement
from .preorder_segments import (
    Segment,
    SegmentMorphism,
    identity,
    unique_quasi_homologous_morphism,
)

OUTSIDE = "-"


class WordError(ValueError):
    """Raised for words that do not fit their segment or alphabet."""


class StudyError(ValueError):
    """Raised when an alignment study violates one of its invariants."""


@dataclass(frozen=True)
class Alphabet:
    """A pointed set of single-character symbols; ``gap`` is the point."""

    letters: tuple[str, ...]
    gap: str = "e"

    def __post_init__(self):
        object.__setattr__(self, "letters", tuple(self.letters))
        for sym in self.letters + (self.gap,):
            if len(sym) != 1 or sym == OUTSIDE:
                raise WordError(f"symbol {sym!r} must be one character other than {OUTSIDE!r}")
        if len(set(self.letters)) != len(self.letters):
            raise WordError("alphabet letters must be distinct")
        if self.gap in self.letters:
            raise WordError(f"gap symbol {self.gap!r} is also a letter")

    @property
    def symbols(self) -> tuple[str, ...]:
        return self.letters + (self.gap,)

    def __contains__(self, sym: object) -> bool:
        return sym in self.letters or sym == self.gap


DNA = Alphabet(("A", "C", "G", "T"), "e")


def truncate(segment: Segment, b: str) -> tuple[int, ...]:
    """Positions ``i`` with ``b <= c(t(i))``, ascending and 1-based."""
    segment.preorder.check(b)
    return _truncate(segment, b)


@lru_cache(maxsize=4096)
def _truncate(segment: Segment, b: str) -> tuple[int, ...]:
    le = segment.preorder.le
    out = []
    for patch, start in enumerate(segment.patch_starts, 1):
        if le(b, segment.color(patch)):
            out.extend(range(start, start + segment.patch_sizes[patch - 1]))
    return tuple(out)


@dataclass(frozen=True)
class Word:
    """An element of the environment set of ``segment`` at ``threshold``.

    ``symbols[k]`` is the value at the ``k``-th truncated position.
    """

    segment: Segment
    threshold: str
    symbols: str

    def __post_init__(self):
        n = len(truncate(self.segment, self.threshold))
        if len(self.symbols) != n:
            raise WordError(f"word has {len(self.symbols)} symbols for {n} truncated positions")

    @property
    def positions(self) -> tuple[int, ...]:
        return truncate(self.segment, self.threshold)

    def at(self, position: int) -> str:
        try:
            return self.symbols[self.positions.index(position)]
        except ValueError:
            raise KeyError(f"position {position} is outside the truncation") from None

    def as_dict(self) -> dict[int, str]:
        return dict(zip(self.positions, self.symbols))

    def render(self, outside: str = OUTSIDE) -> str:
        full = [outside] * self.segment.domain_size
        for pos, sym in zip(self.positions, self.symbols):
            full[pos - 1] = sym
        return "".join(full)

    def __str__(self) -> str:
        return self.symbols

    @classmethod
    def from_full(
        cls, segment: Segment, threshold: str, text: str, alphabet: Alphabet = DNA
    ) -> "Word":
        """Read a full-length string; characters outside the truncation are ignored."""
        if len(text) != segment.domain_size:
            raise WordError(f"expected {segment.domain_size} characters, got {len(text)}")
        symbols = "".join(text[p - 1] for p in truncate(segment, threshold))
        bad = sorted({s for s in symbols if s not in alphabet})
        if bad:
            raise WordError(f"symbols {bad} are not in the alphabet")
        return cls(segment, threshold, symbols)


def transport_word(m: SegmentMorphism, w: Word, gap: str = DNA.gap) -> Word:
    """Image of ``w`` along ``m`` under the environment functor.

    A target position hit by a truncated source position takes its symbol,
    every other truncated target position receives ``gap``.
    """
    if w.segment != m.src:
        raise WordError("word does not live on the source of the morphism")
    return Word(m.dst, w.threshold, _transport_symbols(m, w.threshold, w.symbols, gap))


def _transport_symbols(m: SegmentMorphism, b: str, symbols: str, gap: str) -> str:
    return "".join(symbols[k] if k >= 0 else gap for k in _transport_plan(m, b))


@lru_cache(maxsize=4096)
def _transport_plan(m: SegmentMorphism, b: str) -> tuple[int, ...]:
    """For each truncated target position, the source symbol index or -1."""
    src_pos = truncate(m.src, b)
    hit = {m.f1[i - 1]: k for k, i in enumerate(src_pos)}
    return tuple(hit.get(j, -1) for j in truncate(m.dst, b))


@dataclass(frozen=True)
class Diploid:
    """An ordered pair of alleles; swapping them gives a different diploid."""

    allele1: Word
    allele2: Word

    def __post_init__(self):
        if (self.allele1.segment, self.allele1.threshold) != (
            self.allele2.segment,
            self.allele2.threshold,
        ):
            raise WordError("alleles of a diploid must share segment and threshold")

    @property
    def segment(self) -> Segment:
        return self.allele1.segment

    @property
    def threshold(self) -> str:
        return self.allele1.threshold

    def transport(self, m: SegmentMorphism, gap: str = DNA.gap) -> "Diploid":
        return Diploid(transport_word(m, self.allele1, gap), transport_word(m, self.allele2, gap))

    def __str__(self) -> str:
        return f"{self.allele1}/{self.allele2}"


@dataclass
class AlignmentStudy:
    """A named genotype table on one base segment with its phenotypes.

    ``phenotypes`` maps each name to a non-empty element of the free
    ic-monoid over ``phenotype_labels``.
    """

    base_segment: Segment
    threshold: str
    genotypes: dict[str, Diploid]
    phenotype_labels: tuple[str, ...]
    phenotypes: dict[str, IcmElement]
    alphabet: Alphabet = DNA
    label_universe: AtomUniverse = field(init=False)
    # Memo for values derived from the (never mutated) genotype table.
    derived: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        self.phenotype_labels = tuple(self.phenotype_labels)
        self.label_universe = AtomUniverse(self.phenotype_labels)
        self.base_segment.preorder.check(self.threshold)
        seen: dict[Diploid, str] = {}
        for name, d in self.genotypes.items():
            if d.segment != self.base_segment or d.threshold != self.threshold:
                raise StudyError(f"genotype {name!r} does not live on the base segment")
            if d in seen:
                raise StudyError(f"genotypes {seen[d]!r} and {name!r} carry the same diploid")
            seen[d] = name
        if set(self.phenotypes) != set(self.genotypes):
            missing = sorted(set(self.genotypes) ^ set(self.phenotypes))
            raise StudyError(f"phenotypes and genotypes disagree on names {missing}")
        for name, ph in self.phenotypes.items():
            if ph.universe != self.label_universe:
                raise StudyError(f"phenotype of {name!r} uses foreign labels")
            if ph.is_zero:
                raise StudyError(f"genotype {name!r} has an empty phenotype")

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.genotypes)

    def phenotype_of(self, names: Iterable[str]) -> IcmElement:
        out = self.label_universe.zero()
        for n in names:
            out = out + self.phenotypes[n]
        return out

    @classmethod
    def from_rows(
        cls,
        base_segment: Segment,
        threshold: str,
        rows: Sequence[tuple[str, str, str, Sequence[str]]],
        alphabet: Alphabet = DNA,
        labels: Optional[Sequence[str]] = None,
    ) -> "AlignmentStudy":
        """Build a study from ``(name, allele1, allele2, phenotype labels)`` rows."""
        if labels is None:
            labels = []
            for *_, phs in rows:
                labels.extend(p for p in phs if p not in labels)
        universe = AtomUniverse(labels)
        genotypes, phenotypes = {}, {}
        for name, w1, w2, phs in rows:
            if name in genotypes:
                raise StudyError(f"duplicate genotype name {name!r}")
            genotypes[name] = Diploid(
                Word.from_full(base_segment, threshold, w1, alphabet),
                Word.from_full(base_segment, threshold, w2, alphabet),
            )
            phenotypes[name] = universe.element(phs)
        return cls(base_segment, threshold, genotypes, tuple(labels), phenotypes, alphabet)


@dataclass(frozen=True)
class KanImages:
    """Elements of the left Kan extension at ``target`` with their interpretations.

    ``morphism`` is ``None`` when the base segment has no arrow to
    ``target``; the extension is empty there and ``images`` is empty.
    """

    target: Segment
    morphism: Optional[SegmentMorphism]
    images: tuple[tuple[str, Diploid], ...]

    @property
    def empty(self) -> bool:
        return self.morphism is None


def kan_element_images(study: AlignmentStudy, target: Segment) -> KanImages:
    if target == study.base_segment:
        m: Optional[SegmentMorphism] = identity(target)
    elif target.domain_size != study.base_segment.domain_size:
        m = None
    else:
        m = unique_quasi_homologous_morphism(study.base_segment, target)
    if m is None:
        return KanImages(target, None, ())
    gap = study.alphabet.gap
    images = tuple((name, d.transport(m, gap)) for name, d in study.genotypes.items())
    return KanImages(target, m, images)


def phenotype_table(study: AlignmentStudy, kan: KanImages) -> Mapping[str, IcmElement]:
    """The phenotypic side of the span: each ``(x, f)`` keeps the phenotype of ``x``."""
    return {name: study.phenotypes[name] for name, _ in kan.images}
