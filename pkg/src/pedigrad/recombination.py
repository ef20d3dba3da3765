"""Cones of quasi-homologous segments, haplotypes and recombination classes.

Elements of the free ic-monoid on words (or on diploids) are plain
``frozenset`` objects here. The word universe of a segment is finite but
usually far too large to index with bitmasks, and frozensets already give
union, idempotency and structural equality.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

from .genome_env import DNA, Alphabet, Diploid, Word, WordError, transport_word, truncate
from .icm_algebra import BudgetExceededError
from .preorder_segments import (
    MorphismError,
    PreOrder,
    Segment,
    SegmentMorphism,
    check_morphism,
    unique_quasi_homologous_morphism,
)

Element = Union[Word, Diploid]
HaplogroupElement = frozenset  # frozenset[Diploid]

DEFAULT_ARROW_CAP = 20_000
DEFAULT_CLOSURE_BUDGET = 1 << 16


class ConeError(ValueError):
    """A cone or chromology could not be built from its description."""


@dataclass(frozen=True)
class Cone:
    """A peak segment with an ordered family of quasi-homologous legs.

    The leg morphisms are always recomputed from the segments.
    """

    id: str
    peak: Segment
    legs: tuple[Segment, ...]
    leg_morphisms: tuple[SegmentMorphism, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "legs", tuple(self.legs))
        morphisms = []
        for i, leg in enumerate(self.legs, 1):
            if leg.domain_size != self.peak.domain_size:
                raise ConeError(
                    f"cone {self.id!r}: leg {i} has domain {leg.domain_size}, "
                    f"peak has {self.peak.domain_size}"
                )
            m = unique_quasi_homologous_morphism(self.peak, leg)
            if m is None:
                raise ConeError(f"cone {self.id!r}: no morphism from the peak to leg {i}")
            morphisms.append(m)
        object.__setattr__(self, "leg_morphisms", tuple(morphisms))

    @property
    def k(self) -> int:
        return len(self.legs)

    @classmethod
    def from_masks(cls, id: str, peak: Segment, masks: Sequence[Sequence[int]]) -> "Cone":
        """Each mask lists the 1-based peak patches a leg keeps at their color.

        Every other patch is lowered to the bottom of the pre-order.
        """
        try:
            bottom = peak.preorder.bottom()
        except ValueError as exc:
            raise ConeError(f"cone {id!r}: {exc}") from None
        legs = []
        for i, mask in enumerate(masks, 1):
            keep = set()
            for p in mask:
                if not isinstance(p, int) or isinstance(p, bool) or not 1 <= p <= peak.patch_count:
                    raise ConeError(
                        f"cone {id!r}, leg {i}: patch index {p!r} is outside 1..{peak.patch_count}"
                    )
                keep.add(p)
            colors = tuple(
                peak.color(p) if p in keep else bottom for p in range(1, peak.patch_count + 1)
            )
            legs.append(Segment(peak.patch_sizes, colors, peak.preorder))
        return cls(id, peak, tuple(legs))


@dataclass(frozen=True)
class Chromology:
    preorder: PreOrder
    cones: tuple[Cone, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "cones", tuple(self.cones))
        seen = set()
        for c in self.cones:
            if c.id in seen:
                raise ConeError(f"duplicate cone id {c.id!r}")
            seen.add(c.id)
            if c.peak.preorder != self.preorder or any(l.preorder != self.preorder for l in c.legs):
                raise ConeError(f"cone {c.id!r} is colored over a different pre-order")

    def cone(self, id: str) -> Cone:
        for c in self.cones:
            if c.id == id:
                return c
        raise KeyError(f"unknown cone id {id!r}")

    def cones_at(self, peak: Segment) -> tuple[Cone, ...]:
        return tuple(c for c in self.cones if c.peak == peak)

    def by_domain_size(self) -> dict[int, tuple[Cone, ...]]:
        out: dict[int, list[Cone]] = {}
        for c in self.cones:
            out.setdefault(c.peak.domain_size, []).append(c)
        return {n: tuple(cs) for n, cs in sorted(out.items())}


@dataclass(frozen=True)
class HaplotypeTuple:
    """Per-leg sets of restricted elements; addition is componentwise union."""

    components: tuple[frozenset, ...]

    def __add__(self, other: "HaplotypeTuple") -> "HaplotypeTuple":
        if len(self.components) != len(other.components):
            raise ValueError("haplotype tuples have different lengths")
        return HaplotypeTuple(tuple(a | b for a, b in zip(self.components, other.components)))

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i: int) -> frozenset:
        return self.components[i]

    def __le__(self, other: "HaplotypeTuple") -> bool:
        return all(a <= b for a, b in zip(self.components, other.components))

    def sorted_strings(self) -> list[list[str]]:
        return [sorted(str(x) for x in comp) for comp in self.components]

    def __str__(self) -> str:
        return "(" + ", ".join("+".join(c) or "0" for c in self.sorted_strings()) + ")"


def haplogroup(diploids: Iterable[Diploid]) -> HaplogroupElement:
    out = frozenset(diploids)
    if len({(d.segment, d.threshold) for d in out}) > 1:
        raise WordError("haplogroup members live on different segments")
    return out


def segregate(h: Iterable[Diploid]) -> frozenset[Word]:
    """Split every diploid into its two alleles and collect them."""
    out: set[Word] = set()
    for d in h:
        out.add(d.allele1)
        out.add(d.allele2)
    return frozenset(out)


def _transport(m: SegmentMorphism, x: Element, gap: str) -> Element:
    if isinstance(x, Diploid):
        return x.transport(m, gap)
    return transport_word(m, x, gap)


def haplotype(cone: Cone, x: Iterable[Element], gap: str = DNA.gap) -> HaplotypeTuple:
    """Restrict every element of ``x`` along each leg of ``cone``."""
    x = tuple(x)
    for e in x:
        if e.segment != cone.peak:
            raise WordError(f"element {e} does not live on the peak of cone {cone.id!r}")
    return HaplotypeTuple(
        tuple(frozenset(_transport(m, e, gap) for e in x) for m in cone.leg_morphisms)
    )


def same_haplotype(cone: Cone, x: Iterable[Element], y: Iterable[Element], gap: str = DNA.gap) -> bool:
    return haplotype(cone, x, gap) == haplotype(cone, y, gap)


class Descriptor(enum.Enum):
    """Which ic-monoid valued functor the recombination classes are taken in."""

    FE = "FE"
    F2E = "F2E"
    FLANT = "FLanT"


@dataclass(frozen=True)
class SchemeViolation:
    cone: str
    leg: int
    source_cone: str
    f1: tuple[int, ...]

    def __str__(self) -> str:
        return (
            f"leg {self.leg} of cone {self.cone!r} is not irreducible: the arrow from the "
            f"peak of {self.source_cone!r} with f1={list(self.f1)} does not coequalize its congruence"
        )


@dataclass(frozen=True)
class SchemeReport:
    ok: bool
    threshold: str
    descriptor: Descriptor
    violations: tuple[SchemeViolation, ...] = ()
    approximate: bool = False
    arrows_checked: int = 0
    note: str = ""


def _increasing_injections(src: Segment, dst: Segment, cap: int):
    """Morphisms ``src -> dst``; yields ``None`` once if ``cap`` is reached."""
    n, m = src.domain_size, dst.domain_size
    if n > m or src.preorder != dst.preorder:
        return
    produced = 0
    for f1 in itertools.combinations(range(1, m + 1), n):
        if produced >= cap:
            yield None
            return
        produced += 1
        f0 = []
        ok = True
        for p in range(1, src.patch_count + 1):
            images = {dst.t(f1[i - 1]) for i in src.patch_positions(p)}
            if len(images) != 1:
                ok = False
                break
            f0.append(images.pop())
        if not ok:
            continue
        try:
            yield check_morphism(src, dst, f1, f0)
        except MorphismError:
            continue


def _coequalizes(f: SegmentMorphism, witness: Cone, b: str, descriptor: Descriptor) -> bool:
    """Whether the image of ``f`` identifies every pair with the same ``witness`` haplotype.

    For the free functors on words or diploids, the image of an element only
    depends on the symbols at positions of the source truncation that land in
    the target truncation. That data factors through the haplotype exactly
    when those positions sit inside the truncation of a single leg (an
    alternating-symbol pair over the remaining positions separates the other
    cases). Sums of alignment entries are congruent only when equal, so for
    ``FLANT`` every arrow coequalizes once the cone has a leg.
    """
    if witness.k == 0:
        return False
    if descriptor is Descriptor.FLANT:
        return True
    dst_trunc = set(truncate(f.dst, b))
    surviving = {i for i in truncate(f.src, b) if f.f1[i - 1] in dst_trunc}
    if not surviving:
        return True
    return any(surviving <= set(truncate(leg, b)) for leg in witness.legs)


def check_scheme(
    chromology: Chromology,
    descriptor: Descriptor = Descriptor.FE,
    threshold: str = "1",
    arrow_cap: int = DEFAULT_ARROW_CAP,
) -> SchemeReport:
    """Check that every leg of every cone is irreducible.

    Only arrows whose source is the peak of some cone of the chromology are
    examined; that bounded family is all a finite check can see.
    """
    chromology.preorder.check(threshold)
    if not chromology.cones:
        return SchemeReport(True, threshold, descriptor, note="empty chromology")
    if len(chromology.cones) == 1:
        c = chromology.cones[0]
        if c.k > 0:
            return SchemeReport(True, threshold, descriptor, note="single cone")
    violations: list[SchemeViolation] = []
    approximate = False
    checked = 0
    for target in chromology.cones:
        for leg_no, leg in enumerate(target.legs, 1):
            for witness in chromology.cones:
                for f in _increasing_injections(witness.peak, leg, arrow_cap):
                    if f is None:
                        approximate = True
                        break
                    checked += 1
                    if not _coequalizes(f, witness, threshold, descriptor):
                        violations.append(SchemeViolation(target.id, leg_no, witness.id, f.f1))
                        break
    return SchemeReport(
        not violations, threshold, descriptor, tuple(violations), approximate, checked
    )


def _closure_under(cone: Cone, words: frozenset, alphabet: Alphabet, budget: int) -> frozenset:
    """All peak words whose every leg restriction already occurs in ``words``."""
    if not words:
        if cone.k:
            return frozenset()
        raise BudgetExceededError("zero is congruent to every word under a cone without legs")
    b = next(iter(words)).threshold
    positions = truncate(cone.peak, b)
    allowed = []
    for leg, comp in zip(cone.legs, haplotype(cone, words, alphabet.gap)):
        leg_pos = truncate(leg, b)
        allowed.append((leg_pos, {w.symbols for w in comp}))
    # Position-by-position search with prefix pruning on every leg.
    index_in_leg = [
        {pos: k for k, pos in enumerate(leg_pos)} for leg_pos, _ in allowed
    ]
    prefixes = [
        {s[:j] for s in syms for j in range(len(s) + 1)} for _, syms in allowed
    ]
    found: list[str] = []

    def extend(prefix: list[str], leg_prefix: list[str]):
        if len(found) > budget:
            raise BudgetExceededError(f"class representative exceeds {budget} words")
        depth = len(prefix)
        if depth == len(positions):
            if all(lp in syms for lp, (_, syms) in zip(leg_prefix, allowed)):
                found.append("".join(prefix))
            return
        pos = positions[depth]
        for s in alphabet.symbols:
            new_lp = list(leg_prefix)
            ok = True
            for li, idx in enumerate(index_in_leg):
                if pos in idx:
                    new_lp[li] = leg_prefix[li] + s
                    if new_lp[li] not in prefixes[li]:
                        ok = False
                        break
            if ok:
                prefix.append(s)
                extend(prefix, new_lp)
                prefix.pop()

    extend([], ["" for _ in allowed])
    return frozenset(Word(cone.peak, b, s) for s in found)


def recombination_closure(
    cones: Sequence[Cone],
    words: Iterable[Word],
    alphabet: Alphabet = DNA,
    budget: int = DEFAULT_CLOSURE_BUDGET,
) -> frozenset[Word]:
    """Largest element of the class of ``words`` under the join of the cones' congruences.

    Each cone's congruence is the kernel of its haplotype map, whose closed
    sets are the unions of full haplotype fibers; the join is reached by
    closing under every cone until nothing changes.
    """
    current = frozenset(words)
    while True:
        nxt = current
        for c in cones:
            nxt = nxt | _closure_under(c, nxt, alphabet, budget)
        if nxt == current:
            return current
        current = nxt


def quotient_class(
    cone: Cone,
    x: Iterable[Word],
    chromology: Optional[Chromology] = None,
    alphabet: Alphabet = DNA,
    budget: int = DEFAULT_CLOSURE_BUDGET,
) -> Union[HaplotypeTuple, frozenset]:
    """A canonical key for the recombination class of ``x`` at the peak of ``cone``.

    When the cones of ``chromology`` sharing this peak form a scheme (or no
    chromology is given) the key is the haplotype tuple, which is faithful in
    that case. Otherwise the key is the largest element of the class, computed
    by closure and bounded by ``budget``.
    """
    x = frozenset(x)
    if chromology is None:
        return haplotype(cone, x, alphabet.gap)
    local = chromology.cones_at(cone.peak)
    if cone not in local:
        local = local + (cone,)
    b = next(iter(x)).threshold if x else "1"
    report = check_scheme(Chromology(chromology.preorder, local), Descriptor.FE, b)
    if report.ok:
        return haplotype(cone, x, alphabet.gap)
    return recombination_closure(local, x, alphabet, budget)


__all__ = [
    "Cone",
    "ConeError",
    "Chromology",
    "Descriptor",
    "HaplotypeTuple",
    "HaplogroupElement",
    "SchemeReport",
    "SchemeViolation",
    "check_scheme",
    "haplogroup",
    "haplotype",
    "quotient_class",
    "recombination_closure",
    "same_haplotype",
    "segregate",
]
