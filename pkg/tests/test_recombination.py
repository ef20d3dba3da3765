import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pedigrad.analysis import class_of_sum, peak_images
from pedigrad.genome_env import AlignmentStudy, Word, kan_element_images
from pedigrad.icm_algebra import AtomUniverse, GeneratedCongruence
from pedigrad.preorder_segments import BOOLEAN, Segment
from pedigrad.recombination import (
    Chromology,
    Cone,
    ConeError,
    Descriptor,
    HaplotypeTuple,
    check_scheme,
    haplotype,
    quotient_class,
    recombination_closure,
    same_haplotype,
    segregate,
)

from conftest import CORPUS, RHO_PRIME_SLICES, RHO_SLICES, diploid_on, slice_haplotype


def strings(h: HaplotypeTuple):
    return [{w.symbols for w in comp} for comp in h]


def parse_row(text):
    return [set(leg.split("+")) for leg in text.split(", ")]


# Rows as tabulated for the two cones (legs separated by ", ", sums by "+").
RHO_PRIME_TABLE = {
    "a": "ACCATT+ACCACT, AGC, TACCTATAC+TACATATGC",
    "b": "AGCATT+ACCACT, AGG+AGC, TTCGTATGC+TACCTATTC",
    "c": "AACATT+ACCACT, AGG, TTCTTATAC+TTCATATTC",
    "p4": "AGCATT+ACCACT, AGC+AGG, TACCTATTC+TTCATATTC",
    "p5": "AACATT+ACCACT, AGG+AGC, TTCGTATGC+TTCATATTC",
    "p6": "AACATT+ACCACT, AGG, TTCTTATAC+TTCGTATGC",
}
RHO_TABLE = {
    "a": "ACCATT+ACCACT, AGCTAC, CTATAC+ATATGC",
    "b": "AGCATT+ACCACT, AGGTTC+AGCTAC, GTATGC+CTATTC",
    "c": "AACATT+ACCACT, AGGTTC, TTATAC+ATATTC",
    "p4": "AGCATT+ACCACT, AGCTAC+AGGTTC, CTATTC+ATATTC",
    "p6": "AACATT+ACCACT, AGGTTC, TTATAC+GTATGC",
}


@pytest.mark.parametrize("name", sorted(RHO_PRIME_TABLE))
def test_rho_prime_rows(study, rho_prime, name):
    assert strings(class_of_sum(study, rho_prime, [name])) == parse_row(RHO_PRIME_TABLE[name])


@pytest.mark.parametrize("name", sorted(RHO_TABLE))
def test_rho_rows(study, rho, name):
    assert strings(class_of_sum(study, rho, [name])) == parse_row(RHO_TABLE[name])


def test_rho_aggregate_of_b_and_c(study, rho):
    legs = strings(class_of_sum(study, rho, ["b", "c"]))
    assert legs[0] == {"AGCATT", "ACCACT", "AACATT"}
    assert legs[1] == {"AGGTTC", "AGCTAC"}
    assert legs[2] == {"GTATGC", "CTATTC", "TTATAC", "ATATTC"}


@pytest.mark.parametrize("cone_id, slices", [("rho", RHO_SLICES), ("rho_prime", RHO_PRIME_SLICES)])
def test_every_genotype_matches_slice_oracle(study, chromology, cone_id, slices):
    cone = chromology.cone(cone_id)
    for name in CORPUS:
        assert strings(class_of_sum(study, cone, [name])) == slice_haplotype([name], slices)


def test_segregate():
    seg = Segment.discrete(3, "1")
    d = diploid_on(seg, "ACG", "TTT")
    assert {w.symbols for w in segregate([d])} == {"ACG", "TTT"}
    assert segregate([]) == frozenset()
    assert len(segregate([diploid_on(seg, "ACG", "ACG")])) == 1


def test_empty_haplotype(rho):
    assert haplotype(rho, []) == HaplotypeTuple((frozenset(),) * 3)


def test_haplotype_rejects_foreign_words(rho):
    with pytest.raises(ValueError):
        haplotype(rho, [Word.from_full(Segment.discrete(18, "1"), "1", "A" * 18)])


def _words(study, cone, names):
    images = dict(peak_images(study, cone))
    return segregate(images[n] for n in names)


def test_congruence_facts(study, rho, rho_prime):
    assert same_haplotype(rho, _words(study, rho, ["b", "c"]), _words(study, rho, ["p4", "p6"]))
    assert not same_haplotype(
        rho, _words(study, rho, ["a", "b", "c"]), _words(study, rho, ["p4", "p5", "p6"])
    )
    assert same_haplotype(
        rho_prime, _words(study, rho_prime, ["b", "c"]), _words(study, rho_prime, ["p4", "p5", "p6"])
    )
    # adding the first genotype on one side only breaks the identification
    assert not same_haplotype(
        rho_prime,
        _words(study, rho_prime, ["a", "b", "c"]),
        _words(study, rho_prime, ["p4", "p5", "p6"]),
    )


def test_cone_from_masks_rejects_bad_patch():
    peak = Segment((6, 6, 6), ("1", "1", "1"))
    with pytest.raises(ConeError, match="patch index 4"):
        Cone.from_masks("bad", peak, [[4]])


def test_cone_legs_lowered_to_bottom(rho):
    assert [leg.colors for leg in rho.legs] == [("1", "0", "0"), ("0", "1", "0"), ("0", "0", "1")]
    assert all(m.f1 == tuple(range(1, 19)) for m in rho.leg_morphisms)


def test_scheme_corpus_chromology(chromology):
    for d in Descriptor:
        assert check_scheme(chromology, d).ok


def test_scheme_trivial_cases(rho):
    assert check_scheme(Chromology(BOOLEAN, ())).ok
    assert check_scheme(Chromology(BOOLEAN, (rho,))).ok


def test_scheme_counterexample_names_leg():
    split = Cone.from_masks("split", Segment((2, 2), ("1", "1")), [[1], [2]])
    whole = Cone.from_masks("whole", Segment((4,), ("1",)), [[1]])
    report = check_scheme(Chromology(BOOLEAN, (split, whole)))
    assert not report.ok
    assert [(v.cone, v.leg, v.source_cone) for v in report.violations] == [("whole", 1, "split")]
    assert "leg 1 of cone 'whole'" in str(report.violations[0])
    # sums of alignment entries are only congruent when equal
    assert check_scheme(Chromology(BOOLEAN, (split, whole)), Descriptor.FLANT).ok


def test_quotient_class_on_scheme_is_haplotype(study, chromology, rho):
    x = _words(study, rho, ["b", "c"])
    y = _words(study, rho, ["p4", "p6"])
    assert quotient_class(rho, x, chromology) == quotient_class(rho, y, chromology)
    assert quotient_class(rho, x, chromology) == haplotype(rho, x)
    assert quotient_class(rho, [], chromology) == HaplotypeTuple((frozenset(),) * 3)


# Two cones on one peak whose legs cut in different places: not a scheme,
# so classes come from the closure of the joined congruences.
PEAK3 = Segment((1, 1, 1), ("1", "1", "1"))
LEFT = Cone.from_masks("left", PEAK3, [[1, 2], [3]])
RIGHT = Cone.from_masks("right", PEAK3, [[1], [2, 3]])
CROSSED = Chromology(BOOLEAN, (LEFT, RIGHT))


def w3(s):
    return Word(PEAK3, "1", s)


def test_crossed_cones_are_not_a_scheme():
    assert not check_scheme(CROSSED).ok


def test_closure_joins_both_congruences():
    x = [w3("AAA"), w3("CCC")]
    y = [w3("ACA"), w3("CAC")]
    assert not same_haplotype(LEFT, x, y) and not same_haplotype(RIGHT, x, y)
    kx = quotient_class(LEFT, x, CROSSED)
    assert kx == quotient_class(LEFT, y, CROSSED)
    assert {w.symbols for w in kx} == {"".join(p) for p in itertools.product("AC", repeat=3)}


def test_closure_agrees_with_enumerated_congruence():
    universe_words = ["".join(p) for p in itertools.product("AC", repeat=3)]
    U = AtomUniverse(universe_words)
    subsets = list(U.all_elements())
    pairs = []
    for cone in (LEFT, RIGHT):
        first = {}
        for s in subsets:
            key = haplotype(cone, [w3(a) for a in s])
            pairs.append((first.setdefault(key, s), s))
    classes = GeneratedCongruence(U, pairs).classes_by_enumeration(seeds=[U.full()])
    which = {e: i for i, cls in enumerate(classes) for e in cls}
    rng = random.Random(7)
    for _ in range(300):
        x, y = rng.choice(subsets), rng.choice(subsets)
        kx = recombination_closure((LEFT, RIGHT), [w3(a) for a in x])
        ky = recombination_closure((LEFT, RIGHT), [w3(a) for a in y])
        assert (kx == ky) == (which[x] == which[y])


# Properties on random sums of the bundled genotypes.

names = st.lists(st.sampled_from(sorted(CORPUS)), max_size=6, unique=True)


@pytest.fixture(scope="module")
def rho_words(study, rho):
    return {n: segregate([d]) for n, d in peak_images(study, rho)}


@pytest.fixture(scope="module")
def rho_haplotypes(rho, rho_words):
    return {n: haplotype(rho, w) for n, w in rho_words.items()}


def _union(table, ns):
    return frozenset().union(*(table[n] for n in ns))


@settings(max_examples=1000, deadline=None)
@given(names, names)
def test_haplotype_is_a_monoid_morphism(rho_words, rho, xs, ys):
    x, y = _union(rho_words, xs), _union(rho_words, ys)
    assert haplotype(rho, x | y) == haplotype(rho, x) + haplotype(rho, y)


@settings(max_examples=1000, deadline=None)
@given(names, st.lists(st.sampled_from(sorted(CORPUS)), max_size=18, unique=True), names)
def test_same_haplotype_is_a_congruence(rho_words, rho_haplotypes, rho, xs, pool, zs):
    x = _union(rho_words, xs)
    hx = haplotype(rho, x)
    # enlarge x by genotypes that add nothing new, so that x ~ y holds
    extra = [n for n in pool if rho_haplotypes[n] <= hx]
    y = x | _union(rho_words, extra)
    z = _union(rho_words, zs)
    assert same_haplotype(rho, x, y) and same_haplotype(rho, y, x)
    assert same_haplotype(rho, x, x)
    assert same_haplotype(rho, x | z, y | z)
    assert same_haplotype(rho, x, y | z) == (haplotype(rho, z) <= hx)


# Toy studies: quotient classes against the congruence generated by every
# pair of sums with equal per-leg restrictions.


def toy_case(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 6)
    sizes = []
    while sum(sizes) < n:
        sizes.append(rng.randint(1, n - sum(sizes)))
    peak = Segment(tuple(sizes), ("1",) * len(sizes))
    masks = [[p for p in range(1, len(sizes) + 1) if rng.random() < 0.5] for _ in range(2)]
    cone = Cone.from_masks("toy", peak, masks)
    rows, seen = [], set()
    for i in range(rng.randint(1, 4)):
        pair = tuple("".join(rng.choice("AC") for _ in range(n)) for _ in range(2))
        if pair not in seen:
            seen.add(pair)
            rows.append((f"g{i}", pair[0], pair[1], [rng.choice("hd")]))
    study = AlignmentStudy.from_rows(Segment.discrete(n, "1"), "1", rows)
    return rng, cone, study


def leg_oracle(cone, word: str):
    out = []
    for leg in cone.legs:
        kept = [p for q in range(1, leg.patch_count + 1) if leg.color(q) == "1" for p in leg.patch_positions(q)]
        out.append("".join(word[p - 1] for p in kept))
    return tuple(out)


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 2**32))
def test_quotient_class_matches_generated_congruence(seed):
    rng, cone, study = toy_case(seed)
    chrom = Chromology(BOOLEAN, (cone,))
    words = sorted(segregate(d for _, d in kan_element_images(study, cone.peak).images), key=str)
    U = AtomUniverse([w.symbols for w in words])
    subsets = list(U.all_elements())
    groups = {}
    for s in subsets:
        key = tuple(frozenset(leg_oracle(cone, a)[i] for a in s) for i in range(cone.k))
        groups.setdefault(key, []).append(s)
    pairs = [(g[0], s) for g in groups.values() for s in g[1:]]
    classes = GeneratedCongruence(U, pairs).classes_by_enumeration(seeds=[U.full()])
    which = {e: i for i, cls in enumerate(classes) for e in cls}
    by_symbols = {w.symbols: w for w in words}
    for _ in range(3):
        x, y = rng.choice(subsets), rng.choice(subsets)
        qx = quotient_class(cone, [by_symbols[a] for a in x], chrom)
        qy = quotient_class(cone, [by_symbols[a] for a in y], chrom)
        assert (qx == qy) == (which[x] == which[y])
