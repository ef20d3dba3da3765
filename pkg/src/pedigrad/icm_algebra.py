"""Free idempotent commutative monoids over finite atom sets.

An element of the free ic-monoid on a finite set of atoms is a subset of the
atoms; addition is union and zero is the empty set. Elements are stored as
integer bitmasks over an ordered :class:`AtomUniverse`, so equality and
hashing are structural.

Congruences generated by finitely many pairs are decided through their
closure operator: a set is *closed* when, for every generating pair
``(a, b)``, it contains ``a`` exactly when it contains ``b``. Two elements are
congruent iff they have the same closure. :meth:`GeneratedCongruence.classes_by_enumeration`
computes the same relation the slow way, by union-find over the sub-lattice
reachable from the generators, and is kept as an independent route.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Mapping, Optional, Sequence

DEFAULT_ELEMENT_BUDGET = 1 << 20


class UniverseMismatchError(ValueError):
    """Raised when elements of different universes are combined."""


class BudgetExceededError(RuntimeError):
    """Raised when an enumeration would exceed its configured budget."""


class AtomUniverse:
    """An ordered finite set of distinct, hashable atoms."""

    __slots__ = ("atoms", "_index")

    def __init__(self, atoms: Iterable[Hashable]):
        self.atoms = tuple(atoms)
        self._index = {a: i for i, a in enumerate(self.atoms)}
        if len(self._index) != len(self.atoms):
            raise ValueError("atom universe contains duplicates")

    def __len__(self) -> int:
        return len(self.atoms)

    def __contains__(self, atom: object) -> bool:
        return atom in self._index

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if not isinstance(other, AtomUniverse):
            return NotImplemented
        return self.atoms == other.atoms

    def __hash__(self) -> int:
        return hash(self.atoms)

    def __repr__(self) -> str:
        return f"AtomUniverse({list(self.atoms)!r})"

    def index(self, atom: Hashable) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise KeyError(f"{atom!r} is not an atom of {self!r}") from None

    def element(self, atoms: Iterable[Hashable] = ()) -> "IcmElement":
        bits = 0
        for a in atoms:
            bits |= 1 << self.index(a)
        return IcmElement(self, bits)

    def zero(self) -> "IcmElement":
        return IcmElement(self, 0)

    def full(self) -> "IcmElement":
        return IcmElement(self, (1 << len(self.atoms)) - 1)

    def all_elements(self) -> Iterator["IcmElement"]:
        """Every element of the free monoid, in bitmask order."""
        for bits in range(1 << len(self.atoms)):
            yield IcmElement(self, bits)


@dataclass(frozen=True)
class IcmElement:
    universe: AtomUniverse
    bits: int

    def __add__(self, other: "IcmElement") -> "IcmElement":
        return add(self, other)

    def __iter__(self) -> Iterator[Hashable]:
        bits, i = self.bits, 0
        while bits:
            if bits & 1:
                yield self.universe.atoms[i]
            bits >>= 1
            i += 1

    def __len__(self) -> int:
        return bin(self.bits).count("1")

    def __contains__(self, atom: object) -> bool:
        return atom in self.universe and bool(self.bits >> self.universe.index(atom) & 1)

    def __le__(self, other: "IcmElement") -> bool:
        _same_universe(self, other)
        return self.bits & ~other.bits == 0

    @property
    def is_zero(self) -> bool:
        return self.bits == 0

    def atoms(self) -> tuple:
        return tuple(self)

    def __repr__(self) -> str:
        return "{" + ", ".join(map(str, self)) + "}"


def _same_universe(x: IcmElement, y: IcmElement) -> None:
    if x.universe != y.universe:
        raise UniverseMismatchError("elements belong to different atom universes")


def add(x: IcmElement, y: IcmElement) -> IcmElement:
    _same_universe(x, y)
    return IcmElement(x.universe, x.bits | y.bits)


def total(elements: Iterable[IcmElement], universe: AtomUniverse) -> IcmElement:
    """Finite sum; the empty sum is zero."""
    out = universe.zero()
    for e in elements:
        out = out + e
    return out


@dataclass(frozen=True)
class IcmTuple:
    """An element of a finite product of ic-monoids."""

    components: tuple[IcmElement, ...]

    def __add__(self, other: "IcmTuple") -> "IcmTuple":
        if len(self.components) != len(other.components):
            raise UniverseMismatchError("tuples have different lengths")
        return IcmTuple(tuple(add(a, b) for a, b in zip(self.components, other.components)))

    def __iter__(self):
        return iter(self.components)

    def __len__(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, universes: Sequence[AtomUniverse]) -> "IcmTuple":
        return cls(tuple(u.zero() for u in universes))


class GeneratedCongruence:
    """The smallest monoid congruence containing ``generating_pairs``.

    ``budget`` caps the number of monoid elements visited by
    :meth:`classes_by_enumeration`.
    """

    def __init__(
        self,
        universe: AtomUniverse,
        generating_pairs: Iterable[tuple[IcmElement, IcmElement]] = (),
        budget: int = DEFAULT_ELEMENT_BUDGET,
    ):
        self.universe = universe
        pairs = []
        for a, b in generating_pairs:
            if a.universe != universe or b.universe != universe:
                raise UniverseMismatchError("generating pair outside the universe")
            pairs.append((a, b))
        self.generating_pairs: tuple[tuple[IcmElement, IcmElement], ...] = tuple(pairs)
        self.budget = budget
        self._rules = tuple((a.bits, b.bits) for a, b in pairs)

    def normal_form(self, x: IcmElement) -> IcmElement:
        """The largest element of the congruence class of ``x``."""
        if x.universe != self.universe:
            raise UniverseMismatchError("element outside the congruence universe")
        bits, changed = x.bits, True
        while changed:
            changed = False
            for a, b in self._rules:
                if (a & ~bits == 0) != (b & ~bits == 0):
                    bits |= a | b
                    changed = True
        return IcmElement(self.universe, bits)

    def congruent(self, x: IcmElement, y: IcmElement) -> bool:
        return self.normal_form(x) == self.normal_form(y)

    def quotient_map(self, elements: Iterable[IcmElement]) -> dict[IcmElement, IcmElement]:
        """The coequalizer restricted to ``elements``, as an explicit map."""
        return {e: self.normal_form(e) for e in elements}

    def classes_by_enumeration(self, seeds: Iterable[IcmElement] = ()) -> list[frozenset[IcmElement]]:
        """Congruence classes of the sub-lattice reachable from the seeds.

        The reachable sub-lattice is the closure under addition of zero, the
        generators' components, the ``seeds`` and every atom that occurs in
        them. Pairs are merged with union-find and the partition is closed
        under adding atoms until nothing changes.
        """
        start = {0}
        atoms = 0
        for a, b in self._rules:
            start.update((a, b))
            atoms |= a | b
        for s in seeds:
            if s.universe != self.universe:
                raise UniverseMismatchError("seed outside the congruence universe")
            start.add(s.bits)
            atoms |= s.bits
        singles = [1 << i for i in range(atoms.bit_length()) if atoms >> i & 1]

        reach = set(start)
        frontier = list(start)
        while frontier:
            nxt = []
            for e in frontier:
                for s in singles:
                    f = e | s
                    if f not in reach:
                        reach.add(f)
                        nxt.append(f)
                        if len(reach) > self.budget:
                            raise BudgetExceededError(
                                f"reachable sub-lattice exceeds {self.budget} elements"
                            )
            frontier = nxt

        parent = {e: e for e in reach}

        def find(e: int) -> int:
            root = e
            while parent[root] != root:
                root = parent[root]
            while parent[e] != root:
                parent[e], e = root, parent[e]
            return root

        def union(u: int, v: int) -> bool:
            ru, rv = find(u), find(v)
            if ru == rv:
                return False
            parent[max(ru, rv)] = min(ru, rv)
            return True

        for a, b in self._rules:
            union(a, b)
        ordered = sorted(reach)
        changed = True
        while changed:
            changed = False
            for e in ordered:
                r = find(e)
                if r == e:
                    continue
                for s in singles:
                    if union(e | s, r | s):
                        changed = True
        groups: dict[int, set[IcmElement]] = {}
        for e in ordered:
            groups.setdefault(find(e), set()).add(IcmElement(self.universe, e))
        return [frozenset(g) for _, g in sorted(groups.items())]

    def congruent_by_enumeration(self, x: IcmElement, y: IcmElement) -> bool:
        for cls in self.classes_by_enumeration(seeds=(x, y)):
            if x in cls:
                return y in cls
        raise AssertionError("seed missing from its own reachable sub-lattice")


def congruent(cong: GeneratedCongruence, x: IcmElement, y: IcmElement) -> bool:
    _same_universe(x, y)
    return cong.congruent(x, y)


def mono_witness(f: Mapping) -> Optional[tuple]:
    """Two distinct carrier elements with the same image, or ``None``."""
    seen: dict = {}
    for x, fx in f.items():
        if fx in seen:
            return seen[fx], x
        seen[fx] = x
    return None


def is_mono(f: Mapping) -> bool:
    """Injectivity of an explicit map between finite carriers.

    In the category of ic-monoids this is the same as being a monomorphism,
    because maps out of the two-element monoid pick out single elements.
    """
    return mono_witness(f) is None


def is_epi(f: Mapping, codomain: Iterable) -> bool:
    """Surjectivity of ``f`` onto ``codomain``, which implies epi for ic-monoids."""
    image = set(f.values())
    return all(y in image for y in codomain)
