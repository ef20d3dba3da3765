import pytest

from pedigrad.genome_env import Diploid, Word
from pedigrad.io import example_chromology, example_study

# name -> (allele1, allele2, phenotype labels), transcribed independently of
# the bundled data file so the two can be checked against each other.
CORPUS = {
    "a": ("ACCATTAGCTACCTATAC", "ACCACTAGCTACATATGC", {"dis"}),
    "b": ("AGCATTAGGTTCGTATGC", "ACCACTAGCTACCTATTC", {"hea"}),
    "c": ("AACATTAGGTTCTTATAC", "ACCACTAGGTTCATATTC", {"dis"}),
    "p1": ("ACCATTAGCTACATATGC", "AGCATTAGGTACCTATTC", {"hea"}),
    "p2": ("AGCATTAGCTTCGTATGC", "ACCACTAGCTACATATGC", {"hea"}),
    "p3": ("AGCATTAGGTACCTATTC", "ACCACTAGCTACCTATAC", {"hea"}),
    "p4": ("AGCATTAGCTACCTATTC", "ACCACTAGGTTCATATTC", {"hea"}),
    "p5": ("AACATTAGGTTCGTATGC", "ACCACTAGCTTCATATTC", {"hea"}),
    "p6": ("AACATTAGGTTCTTATAC", "ACCACTAGGTTCGTATGC", {"hea"}),
    "p7": ("ACCATTAGCTACATATGC", "AACATTAGGTTCATATTC", {"dis"}),
    "p8": ("ACCACTAGCTACATATGC", "AACATTAGGTTCTTATAC", {"dis"}),
    "p9": ("ACCACTAGGTTCTTATAC", "ACCATTAGCTACCTATAC", {"hea"}),
    "p10": ("ACCATTAGGTACATATGC", "ACCACTAGCTACCTATTC", {"dis"}),
    "p11": ("AACATTAGGTACATATGC", "ACCATTAGGTTCATATTC", {"dis"}),
    "p12": ("AACATTAGCTTCTTATAC", "AGCATTAGCTTCATATTC", {"hea"}),
    "p13": ("ACCACTAGCTACATATGC", "ACCACTAGCTACATATGC", {"hea"}),
    "p14": ("ACCACTAGGTTCGTATGC", "AGCATTAGGTTCGTATGC", {"hea"}),
    "p15": ("ACCACTAGGTTCATATTC", "ACCACTAGGTACCTATAC", {"hea"}),
}

# Leg slices of the two bundled cones, as 0-based string slices.
RHO_SLICES = [slice(0, 6), slice(6, 12), slice(12, 18)]
RHO_PRIME_SLICES = [slice(0, 6), slice(6, 9), slice(9, 18)]


def slice_haplotype(names, slices):
    """Oracle: per-leg sets of allele substrings, straight from the table."""
    out = []
    for sl in slices:
        out.append({CORPUS[n][k][sl] for n in names for k in (0, 1)})
    return out


@pytest.fixture(scope="session")
def study():
    return example_study()


@pytest.fixture(scope="session")
def chromology():
    return example_chromology()


@pytest.fixture(scope="session")
def rho(chromology):
    return chromology.cone("rho")


@pytest.fixture(scope="session")
def rho_prime(chromology):
    return chromology.cone("rho_prime")


def diploid_on(segment, w1, w2, threshold="1"):
    return Diploid(Word.from_full(segment, threshold, w1), Word.from_full(segment, threshold, w2))
