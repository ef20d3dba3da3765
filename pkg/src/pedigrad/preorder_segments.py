"""Finite pre-ordered sets, segments over them and morphisms of segments.

Positions and patch indices are 1-based throughout, matching the way
alignments are usually tabulated.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Optional, Sequence


class SegmentError(ValueError):
    """Raised when a segment literal or its data is malformed."""


class MorphismError(ValueError):
    """Raised when a pair of maps does not define a morphism of segments."""


class DomainMismatchError(ValueError):
    """Raised when two segments are compared that are not quasi-homologous."""


class PreOrder:
    """A finite pre-ordered set.

    ``relations`` may be any list of ``(x, y)`` pairs meaning ``x <= y``; the
    reflexive-transitive closure is computed at construction.

    >>> p = PreOrder(["0", "1", "2"], [("0", "1"), ("1", "2")])
    >>> p.le("0", "2"), p.le("2", "0")
    (True, False)
    """

    __slots__ = ("elements", "leq", "_index", "_hash")

    def __init__(self, elements: Iterable[str], relations: Iterable[tuple[str, str]] = ()):
        self.elements: tuple[str, ...] = tuple(str(e) for e in elements)
        if len(set(self.elements)) != len(self.elements):
            raise ValueError(f"duplicate pre-order elements in {self.elements!r}")
        self._index = {e: i for i, e in enumerate(self.elements)}
        pairs = set()
        for x, y in relations:
            x, y = str(x), str(y)
            for e in (x, y):
                if e not in self._index:
                    raise ValueError(f"relation mentions unknown element {e!r}")
            pairs.add((x, y))
        self.leq: frozenset[tuple[str, str]] = _closure(self.elements, pairs)
        self._hash = hash((self.elements, self.leq))

    def __contains__(self, x: object) -> bool:
        return x in self._index

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PreOrder):
            return NotImplemented
        return self.elements == other.elements and self.leq == other.leq

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        strict = sorted((x, y) for x, y in self.leq if x != y)
        return f"PreOrder({list(self.elements)!r}, {strict!r})"

    def le(self, x: str, y: str) -> bool:
        return (x, y) in self.leq

    def check(self, x: str) -> str:
        if x not in self._index:
            raise ValueError(f"{x!r} is not an element of {self!r}")
        return x

    def bottoms(self) -> tuple[str, ...]:
        return tuple(b for b in self.elements if all(self.le(b, y) for y in self.elements))

    def bottom(self) -> str:
        """The first element lying below every other one."""
        found = self.bottoms()
        if not found:
            raise ValueError(f"{self!r} has no bottom element")
        return found[0]

    def as_dict(self) -> dict:
        strict = sorted([x, y] for x, y in self.leq if x != y)
        return {"elements": list(self.elements), "relations": strict}

    @classmethod
    def from_dict(cls, data: dict) -> "PreOrder":
        return cls(data["elements"], [tuple(r) for r in data.get("relations", ())])


def _closure(elements: Sequence[str], pairs: set[tuple[str, str]]) -> frozenset[tuple[str, str]]:
    leq = set(pairs) | {(e, e) for e in elements}
    # Warshall
    for k in elements:
        below_k = [x for x in elements if (x, k) in leq]
        above_k = [y for y in elements if (k, y) in leq]
        for x in below_k:
            for y in above_k:
                leq.add((x, y))
    return frozenset(leq)


BOOLEAN = PreOrder(["0", "1"], [("0", "1")])


@dataclass(frozen=True)
class Segment:
    """A patch topology over ``[domain_size]`` with a color per patch.

    The order-preserving surjection ``t: [n1] -> [n0]`` is stored as the list
    of its fiber sizes, which is canonical because fibers are contiguous.
    """

    patch_sizes: tuple[int, ...]
    colors: tuple[str, ...]
    preorder: PreOrder = field(default=BOOLEAN, compare=True, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "patch_sizes", tuple(int(p) for p in self.patch_sizes))
        object.__setattr__(self, "colors", tuple(str(c) for c in self.colors))
        if len(self.patch_sizes) != len(self.colors):
            raise SegmentError(
                f"{len(self.patch_sizes)} patches but {len(self.colors)} colors"
            )
        for i, size in enumerate(self.patch_sizes, 1):
            if size < 1:
                raise SegmentError(f"patch {i} has length {size}; patches must be non-empty")
        for i, color in enumerate(self.colors, 1):
            if color not in self.preorder:
                raise SegmentError(f"patch {i} has color {color!r} outside the pre-order")

    # Segments key several caches, so the hash is computed once.
    @cached_property
    def _hash(self) -> int:
        return hash((self.patch_sizes, self.colors, self.preorder))

    def __hash__(self) -> int:
        return self._hash

    @cached_property
    def domain_size(self) -> int:
        return sum(self.patch_sizes)

    @property
    def patch_count(self) -> int:
        return len(self.patch_sizes)

    @cached_property
    def topology(self) -> tuple[int, ...]:
        """``t`` as a tuple: entry ``i - 1`` is the patch of position ``i``."""
        out: list[int] = []
        for patch, size in enumerate(self.patch_sizes, 1):
            out.extend([patch] * size)
        return tuple(out)

    @cached_property
    def patch_starts(self) -> tuple[int, ...]:
        starts, pos = [], 1
        for size in self.patch_sizes:
            starts.append(pos)
            pos += size
        return tuple(starts)

    def t(self, position: int) -> int:
        return self.topology[position - 1]

    def color(self, patch: int) -> str:
        return self.colors[patch - 1]

    def color_at(self, position: int) -> str:
        return self.colors[self.t(position) - 1]

    def patch_positions(self, patch: int) -> range:
        start = self.patch_starts[patch - 1]
        return range(start, start + self.patch_sizes[patch - 1])

    def literal(self) -> str:
        return "".join(f"({s}:{c})" for s, c in zip(self.patch_sizes, self.colors))

    def __str__(self) -> str:
        return self.literal()

    @classmethod
    def discrete(cls, n: int, color: str, preorder: PreOrder = BOOLEAN) -> "Segment":
        """The segment with ``n`` singleton patches all of one color."""
        return cls((1,) * n, (color,) * n, preorder)

    @classmethod
    def parse(cls, text: str, preorder: PreOrder = BOOLEAN) -> "Segment":
        return parse_segment(text, preorder)


_PATCH = re.compile(r"\((\d+):([^()\s:]+)\)")


def parse_segment(text: str, preorder: PreOrder = BOOLEAN) -> Segment:
    """Parse a literal such as ``"(3:1)(2:0)(4:1)"``.

    Syntax errors raise :class:`SegmentError` naming the character offset.
    """
    text = text.strip()
    sizes, colors = [], []
    pos = 0
    while pos < len(text):
        m = _PATCH.match(text, pos)
        if m is None:
            raise SegmentError(f"malformed segment literal {text!r} at offset {pos}")
        sizes.append(int(m.group(1)))
        colors.append(m.group(2))
        pos = m.end()
    return Segment(tuple(sizes), tuple(colors), preorder)


def validate_segment(patch_sizes: Sequence[int], colors: Sequence[str], preorder: PreOrder = BOOLEAN) -> Segment:
    return Segment(tuple(patch_sizes), tuple(colors), preorder)


@dataclass(frozen=True)
class SegmentMorphism:
    """A validated morphism ``(f1, f0): src -> dst``.

    ``f1[i - 1]`` is the image of position ``i`` and ``f0[p - 1]`` the image of
    patch ``p``. Build instances with :func:`check_morphism`.
    """

    src: Segment
    dst: Segment
    f1: tuple[int, ...]
    f0: tuple[int, ...]

    @cached_property
    def _hash(self) -> int:
        return hash((self.src, self.dst, self.f1, self.f0))

    def __hash__(self) -> int:
        return self._hash

    def then(self, other: "SegmentMorphism") -> "SegmentMorphism":
        """Composite ``other . self``."""
        if other.src != self.dst:
            raise MorphismError("morphisms are not composable")
        f1 = tuple(other.f1[j - 1] for j in self.f1)
        f0 = tuple(other.f0[p - 1] for p in self.f0)
        return check_morphism(self.src, other.dst, f1, f0)

    @property
    def is_identity(self) -> bool:
        return (
            self.src == self.dst
            and self.f1 == tuple(range(1, self.src.domain_size + 1))
            and self.f0 == tuple(range(1, self.src.patch_count + 1))
        )


def identity(seg: Segment) -> SegmentMorphism:
    return SegmentMorphism(
        seg, seg, tuple(range(1, seg.domain_size + 1)), tuple(range(1, seg.patch_count + 1))
    )


def check_morphism(src: Segment, dst: Segment, f1: Sequence[int], f0: Sequence[int]) -> SegmentMorphism:
    """Validate ``(f1, f0)`` as a morphism of segments and return it.

    Raises :class:`MorphismError` when ``f1`` is not a strictly increasing map
    into the target domain, ``f0`` is not order-preserving, the square
    ``t' . f1 = f0 . t`` fails, or some patch gets a color that is not below
    its source color.
    """
    f1, f0 = tuple(int(v) for v in f1), tuple(int(v) for v in f0)
    if src.preorder != dst.preorder:
        raise MorphismError("segments are colored over different pre-orders")
    if len(f1) != src.domain_size:
        raise MorphismError(f"f1 has {len(f1)} values for a domain of size {src.domain_size}")
    if len(f0) != src.patch_count:
        raise MorphismError(f"f0 has {len(f0)} values for {src.patch_count} patches")
    for i, v in enumerate(f1, 1):
        if not 1 <= v <= dst.domain_size:
            raise MorphismError(f"f1({i}) = {v} lies outside [{dst.domain_size}]")
        if i > 1 and f1[i - 2] >= v:
            raise MorphismError(f"f1 is not strictly increasing at position {i}")
    for p, v in enumerate(f0, 1):
        if not 1 <= v <= dst.patch_count:
            raise MorphismError(f"f0({p}) = {v} lies outside [{dst.patch_count}]")
        if p > 1 and f0[p - 2] > v:
            raise MorphismError(f"f0 is not order-preserving at patch {p}")
    for i, v in enumerate(f1, 1):
        if dst.t(v) != f0[src.t(i) - 1]:
            raise MorphismError(f"square does not commute at position {i}")
    order = src.preorder
    for p, v in enumerate(f0, 1):
        if not order.le(dst.color(v), src.color(p)):
            raise MorphismError(
                f"color condition fails at patch {p}: {dst.color(v)!r} is not below {src.color(p)!r}"
            )
    return SegmentMorphism(src, dst, f1, f0)


def unique_quasi_homologous_morphism(src: Segment, dst: Segment) -> Optional[SegmentMorphism]:
    """The only morphism ``src -> dst`` with identity ``f1``, or ``None``.

    Both segments must share their domain; otherwise
    :class:`DomainMismatchError` is raised, which is a different situation
    from "no morphism exists".
    """
    if src.domain_size != dst.domain_size:
        raise DomainMismatchError(
            f"domains differ: [{src.domain_size}] versus [{dst.domain_size}]"
        )
    if src.preorder != dst.preorder:
        return None
    f0 = []
    for p in range(1, src.patch_count + 1):
        images = {dst.t(i) for i in src.patch_positions(p)}
        if len(images) != 1:
            return None
        f0.append(images.pop())
    if any(not src.preorder.le(dst.color(v), src.color(p)) for p, v in enumerate(f0, 1)):
        return None
    return SegmentMorphism(src, dst, tuple(range(1, src.domain_size + 1)), tuple(f0))
