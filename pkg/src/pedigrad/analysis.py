"""Marker localization, phenotype prediction and fiber analysis on a study.

Sums of alignment entries are enumerated as subsets of genotype names. To
keep that cheap, every genotype's per-leg contribution is encoded as a
bitmask over the words of the target haplotype, so "the union of a subset
equals the target" becomes a single OR-and-compare.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .genome_env import AlignmentStudy, Diploid, kan_element_images, truncate
from .icm_algebra import BudgetExceededError, IcmElement
from .preorder_segments import Segment
from .recombination import Chromology, Cone, HaplotypeTuple, haplotype, segregate

DEFAULT_SUBSET_BUDGET = 25

# Above this many free genotypes the split tables would not fit comfortably.
_LOW_HALF_MAX = 14


class NoMorphismError(ValueError):
    """The base segment of the study has no arrow to the requested segment."""


class UnrealizableClassError(ValueError):
    """No sum of alignment entries has the requested haplotype."""


class Projection(enum.Enum):
    BOTH = "both"
    ALLELE1 = "allele1"
    ALLELE2 = "allele2"


def _key(d: Diploid, projection: Projection) -> tuple[str, ...]:
    if projection is Projection.BOTH:
        return (d.allele1.symbols, d.allele2.symbols)
    if projection is Projection.ALLELE1:
        return (d.allele1.symbols,)
    return (d.allele2.symbols,)


def _labels(x: IcmElement) -> list[str]:
    return [str(a) for a in x]


def _phen_str(x: IcmElement) -> str:
    return "+".join(_labels(x)) or "0"


@dataclass(frozen=True)
class Conflict:
    first: str
    second: str
    restriction: tuple[str, ...]
    phenotype1: IcmElement
    phenotype2: IcmElement

    def to_dict(self) -> dict:
        return {
            "pair": [self.first, self.second],
            "restriction": list(self.restriction),
            "phenotypes": [_labels(self.phenotype1), _labels(self.phenotype2)],
        }


@dataclass(frozen=True)
class SeparationReport:
    target_segment: Segment
    projection: Projection
    conflicts: tuple[Conflict, ...]

    @property
    def separated(self) -> bool:
        return not self.conflicts

    def conflict_pairs(self) -> set[tuple[str, str]]:
        return {(c.first, c.second) for c in self.conflicts}

    def to_dict(self) -> dict:
        return {
            "target": self.target_segment.literal(),
            "projection": self.projection.value,
            "separated": self.separated,
            "conflicts": [c.to_dict() for c in self.conflicts],
        }

    def render_text(self) -> str:
        lines = [
            f"target {self.target_segment.literal()}",
            f"projection {self.projection.value}",
            f"separated {str(self.separated).lower()}",
        ]
        for c in self.conflicts:
            lines.append(
                f"conflict {c.first} {c.second} restriction {'/'.join(c.restriction)} "
                f"phenotypes {_phen_str(c.phenotype1)} vs {_phen_str(c.phenotype2)}"
            )
        return "\n".join(lines)


def separation_check(
    study: AlignmentStudy, target: Segment, projection: Projection = Projection.BOTH
) -> SeparationReport:
    """Find genotypes that look the same at ``target`` but carry different phenotypes.

    No conflicts means the phenotype map factors injectively through the
    restricted diploids, i.e. the target localizes every marker.
    """
    kan = kan_element_images(study, target)
    if kan.empty:
        raise NoMorphismError(
            f"no morphism from {study.base_segment.literal()} to {target.literal()}"
        )
    groups: dict[tuple[str, ...], list[str]] = {}
    for name, d in kan.images:
        groups.setdefault(_key(d, projection), []).append(name)
    conflicts = []
    order = {n: i for i, n in enumerate(study.names)}
    for key, names in groups.items():
        for u, v in itertools.combinations(names, 2):
            pu, pv = study.phenotypes[u], study.phenotypes[v]
            if pu != pv:
                conflicts.append(Conflict(u, v, key, pu, pv))
    conflicts.sort(key=lambda c: (order[c.first], order[c.second]))
    return SeparationReport(target, projection, tuple(conflicts))


def marker_segment(length: int, black: Iterable[int], black_color: str = "1", white_color: str = "0", preorder=None) -> Segment:
    """Singleton patches of ``black_color`` at ``black``; maximal ``white_color`` runs elsewhere."""
    black = sorted(set(black))
    if any(not 1 <= p <= length for p in black):
        raise ValueError(f"black positions must lie in 1..{length}")
    sizes, colors = [], []
    prev = 0
    for p in black:
        if p - prev > 1:
            sizes.append(p - prev - 1)
            colors.append(white_color)
        sizes.append(1)
        colors.append(black_color)
        prev = p
    if length > prev:
        sizes.append(length - prev)
        colors.append(white_color)
    kwargs = {} if preorder is None else {"preorder": preorder}
    return Segment(tuple(sizes), tuple(colors), **kwargs)


def minimize_markers(
    study: AlignmentStudy, max_black_positions: int, smallest_only: bool = False
) -> list[Segment]:
    """Marker segments on which the full diploids separate phenotypes.

    A marker set is kept when it separates and none of its proper subsets
    does, so adding positions to a returned set never yields another result.
    Sets come out by size, then lexicographically. With ``smallest_only``
    only the sets of the least size are returned.
    """
    base = study.base_segment
    n = base.domain_size
    if not 0 <= max_black_positions <= n:
        raise ValueError(f"max_black_positions must lie in 0..{n}")
    preorder = base.preorder
    black = study.threshold
    white = preorder.bottom()
    kept: list[frozenset[int]] = []
    found: list[Segment] = []
    for size in range(max_black_positions + 1):
        if smallest_only and found:
            break
        for positions in itertools.combinations(range(1, n + 1), size):
            chosen = frozenset(positions)
            if any(k <= chosen for k in kept):
                continue
            target = marker_segment(n, positions, black, white, preorder)
            kan = kan_element_images(study, target)
            if kan.empty:
                continue
            if _separates(study, kan.images):
                kept.append(chosen)
                found.append(target)
    return found


def _separates(study: AlignmentStudy, images) -> bool:
    seen: dict[tuple[str, str], IcmElement] = {}
    for name, d in images:
        key = (d.allele1.symbols, d.allele2.symbols)
        ph = study.phenotypes[name]
        if seen.setdefault(key, ph) != ph:
            return False
    return True


def black_positions(segment: Segment, threshold: str = "1") -> tuple[int, ...]:
    return truncate(segment, threshold)


@dataclass(frozen=True)
class LegStep:
    leg: int
    passed: bool
    missing: frozenset

    def to_dict(self) -> dict:
        return {"leg": self.leg, "pass": self.passed, "missing": sorted(str(w) for w in self.missing)}


@dataclass(frozen=True)
class FiberMember:
    names: tuple[str, ...]
    phenotype: IcmElement

    def to_dict(self) -> dict:
        return {"sum": list(self.names), "phenotype": _labels(self.phenotype)}


@dataclass(frozen=True)
class PredictionReport:
    query: frozenset
    cone_id: str
    target: HaplotypeTuple
    step1: tuple[LegStep, ...]
    step2: bool
    fiber: tuple[FiberMember, ...]
    candidates: tuple[str, ...] = ()

    @property
    def step1_passed(self) -> bool:
        return all(s.passed for s in self.step1)

    @property
    def predicted_phenotypes(self) -> dict[IcmElement, int]:
        """Each distinct phenotype value with the number of sums supporting it."""
        out: dict[IcmElement, int] = {}
        for m in self.fiber:
            out[m.phenotype] = out.get(m.phenotype, 0) + 1
        return out

    def to_dict(self) -> dict:
        pred = sorted(self.predicted_phenotypes.items(), key=lambda kv: (len(kv[0]), kv[0].bits))
        return {
            "cone": self.cone_id,
            "query": sorted(str(d) for d in self.query),
            "target": self.target.sorted_strings(),
            "step1": {"pass": self.step1_passed, "legs": [s.to_dict() for s in self.step1]},
            "step2": {"pass": self.step2, "candidates": list(self.candidates)},
            "fiber": [m.to_dict() for m in self.fiber],
            "predicted_phenotypes": [{"phenotype": _labels(p), "support": n} for p, n in pred],
        }

    def render_text(self) -> str:
        d = self.to_dict()
        lines = [f"cone {self.cone_id}"]
        lines += [f"query {q}" for q in d["query"]]
        lines.append(f"target {self.target}")
        lines.append(f"step1 {'pass' if self.step1_passed else 'fail'}")
        for s in self.step1:
            extra = f" missing {'+'.join(sorted(str(w) for w in s.missing))}" if s.missing else ""
            lines.append(f"  leg {s.leg} {'pass' if s.passed else 'fail'}{extra}")
        lines.append(f"step2 {'pass' if self.step2 else 'fail'}")
        lines.append(f"fiber {len(self.fiber)}")
        for m in self.fiber:
            lines.append(f"  {'+'.join(m.names) or '0'} -> {_phen_str(m.phenotype)}")
        for p in d["predicted_phenotypes"]:
            lines.append(f"predicted {'+'.join(p['phenotype']) or '0'} support {p['support']}")
        return "\n".join(lines)


@dataclass(frozen=True)
class FiberComponentReport:
    cone_id: str
    representative: HaplotypeTuple
    components: dict  # IcmElement -> tuple of name tuples

    @property
    def multi_component(self) -> bool:
        return len(self.components) > 1

    def to_dict(self) -> dict:
        comps = sorted(self.components.items(), key=lambda kv: (len(kv[0]), kv[0].bits))
        return {
            "cone": self.cone_id,
            "class": self.representative.sorted_strings(),
            "components": [
                {"phenotype": _labels(p), "members": [list(m) for m in ms]} for p, ms in comps
            ],
        }

    def render_text(self) -> str:
        lines = [f"cone {self.cone_id}", f"class {self.representative}", f"components {len(self.components)}"]
        for comp in self.to_dict()["components"]:
            lines.append(f"phenotype {'+'.join(comp['phenotype']) or '0'}")
            for m in comp["members"]:
                lines.append(f"  {'+'.join(m) or '0'}")
        return "\n".join(lines)


def peak_images(study: AlignmentStudy, cone: Cone) -> list[tuple[str, Diploid]]:
    kan = kan_element_images(study, cone.peak)
    if kan.empty:
        raise NoMorphismError(
            f"no morphism from {study.base_segment.literal()} to the peak of {cone.id!r}"
        )
    return list(kan.images)


def genotype_haplotypes(study: AlignmentStudy, cone: Cone) -> list[tuple[str, HaplotypeTuple]]:
    """Per genotype, the haplotype of its two alleles at the peak of ``cone``."""
    key = ("genotype_haplotypes", cone)
    if key not in study.derived:
        gap = study.alphabet.gap
        study.derived[key] = [
            (name, haplotype(cone, segregate([d]), gap)) for name, d in peak_images(study, cone)
        ]
    return list(study.derived[key])


def _check_query(query: Iterable[Diploid], cone: Cone) -> frozenset:
    q = frozenset(query)
    for d in q:
        if d.segment != cone.peak:
            raise ValueError(f"query diploid {d} does not live on the peak of {cone.id!r}")
    return q


def _fiber(
    study: AlignmentStudy,
    cone: Cone,
    target: HaplotypeTuple,
    budget: int,
) -> tuple[list[tuple[str, ...]], tuple[str, ...], list[LegStep], bool]:
    per_genotype = genotype_haplotypes(study, cone)
    step1 = []
    for i, comp in enumerate(target.components):
        inside = [h[i] for _, h in per_genotype if h[i] <= comp]
        reach = frozenset().union(*inside) if inside else frozenset()
        step1.append(LegStep(i + 1, reach == comp, comp - reach))
    candidates = [(n, h) for n, h in per_genotype if h <= target]
    cover = HaplotypeTuple(tuple(frozenset() for _ in target.components))
    for _, h in candidates:
        cover = cover + h
    step2 = cover == target
    names = tuple(n for n, _ in candidates)
    if not step2:
        return [], names, step1, False
    if len(candidates) > budget:
        raise BudgetExceededError(
            f"{len(candidates)} candidate genotypes exceed the subset budget of {budget}"
        )
    members = _matching_subsets([h for _, h in candidates], target)
    fiber = [tuple(names[i] for i in idx) for idx in members]
    return fiber, names, step1, bool(fiber)


def _encode(hs: Sequence[HaplotypeTuple], target: HaplotypeTuple) -> tuple[np.ndarray, np.ndarray]:
    index = {}
    for i, comp in enumerate(target.components):
        for w in sorted(comp, key=str):
            index[(i, w)] = len(index)
    words = max(1, -(-len(index) // 64))

    def pack(pairs) -> np.ndarray:
        out = np.zeros(words, dtype=np.uint64)
        for p in pairs:
            b = index[p]
            out[b // 64] |= np.uint64(1) << np.uint64(b % 64)
        return out

    masks = np.stack([pack((i, w) for i, comp in enumerate(h.components) for w in comp) for h in hs]) \
        if hs else np.zeros((0, words), dtype=np.uint64)
    full = pack(index)
    return masks, full


def _or_table(masks: np.ndarray) -> np.ndarray:
    """Row ``s`` is the OR of ``masks[j]`` over the bits ``j`` set in ``s``."""
    table = np.zeros((1, masks.shape[1]), dtype=np.uint64)
    for m in masks:
        table = np.concatenate([table, table | m])
    return table


def _matching_subsets(hs: Sequence[HaplotypeTuple], target: HaplotypeTuple) -> list[tuple[int, ...]]:
    """Index tuples of every subset whose union is exactly ``target``.

    Only genotypes already inside the target are passed in, so "union covers
    the target" is the same as "union equals the target".
    """
    if not any(target.components):
        return [()]
    masks, full = _encode(hs, target)
    n = len(hs)
    low = min(n, _LOW_HALF_MAX)
    low_table = _or_table(masks[:low])
    high_table = _or_table(masks[low:])
    found = []
    for h, hv in enumerate(high_table):
        hits = np.nonzero(((low_table | hv) == full).all(axis=1))[0]
        for lo in hits.tolist():
            s = lo | (h << low)
            found.append(tuple(i for i in range(n) if s >> i & 1))
    found.sort(key=lambda idx: (len(idx), idx))
    return found


def predict(
    study: AlignmentStudy,
    chromology: Chromology,
    cone_id: str,
    query: Iterable[Diploid],
    budget: int = DEFAULT_SUBSET_BUDGET,
) -> PredictionReport:
    """Lift a query haplogroup through the study and read off phenotypes.

    Step 1 asks, leg by leg, whether the target words can be produced by
    genotypes in the study. Step 2 asks for one sum that does it on every
    leg at once. The fiber lists every such sum with its phenotype.
    """
    cone = chromology.cone(cone_id)
    q = _check_query(query, cone)
    target = haplotype(cone, segregate(q), study.alphabet.gap)
    fiber, names, step1, step2 = _fiber(study, cone, target, budget)
    members = tuple(FiberMember(f, study.phenotype_of(f)) for f in fiber)
    return PredictionReport(q, cone_id, target, tuple(step1), step2, members, names)


def fiber_components(
    study: AlignmentStudy,
    chromology: Chromology,
    cone_id: str,
    cls: HaplotypeTuple,
    budget: int = DEFAULT_SUBSET_BUDGET,
) -> FiberComponentReport:
    """Group the sums realizing ``cls`` by phenotype value."""
    cone = chromology.cone(cone_id)
    if len(cls) != cone.k:
        raise ValueError(f"class has {len(cls)} components, cone {cone_id!r} has {cone.k} legs")
    fiber, _, _, ok = _fiber(study, cone, cls, budget)
    if not ok:
        raise UnrealizableClassError(f"no sum of alignment entries has haplotype {cls}")
    comps: dict[IcmElement, list[tuple[str, ...]]] = {}
    for f in fiber:
        comps.setdefault(study.phenotype_of(f), []).append(f)
    return FiberComponentReport(cone_id, cls, {p: tuple(ms) for p, ms in comps.items()})


def class_of_sum(study: AlignmentStudy, cone: Cone, names: Iterable[str]) -> HaplotypeTuple:
    """Haplotype of the sum of the named alignment entries at the peak of ``cone``."""
    images = dict(peak_images(study, cone))
    chosen = []
    for n in names:
        if n not in images:
            raise KeyError(f"unknown genotype {n!r}")
        chosen.append(images[n])
    return haplotype(cone, segregate(chosen), study.alphabet.gap)


def all_sum_classes(study: AlignmentStudy, cone: Cone, limit: int = 22) -> dict[HaplotypeTuple, list[int]]:
    """Every subset of the study grouped by haplotype (subsets as bitmasks).

    Meant for corpora of moderate size; ``limit`` caps the genotype count.
    """
    per = genotype_haplotypes(study, cone)
    if len(per) > limit:
        raise BudgetExceededError(f"{len(per)} genotypes exceed the enumeration limit of {limit}")
    union = HaplotypeTuple(tuple(frozenset() for _ in range(cone.k)))
    for _, h in per:
        union = union + h
    masks, _ = _encode([h for _, h in per], union)
    table = _or_table(masks)
    _, inverse = np.unique(table, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    groups: dict[int, list[int]] = {}
    for s, g in enumerate(inverse.tolist()):
        groups.setdefault(g, []).append(s)
    out: dict[HaplotypeTuple, list[int]] = {}
    for members in groups.values():
        s = members[0]
        h = HaplotypeTuple(tuple(frozenset() for _ in range(cone.k)))
        for i, (_, hi) in enumerate(per):
            if s >> i & 1:
                h = h + hi
        out[h] = members
    return out
