"""Segments, recombination classes and phenotype prediction for aligned diploids."""

from .preorder_segments import (
    BOOLEAN,
    PreOrder,
    Segment,
    SegmentMorphism,
    check_morphism,
    parse_segment,
    unique_quasi_homologous_morphism,
)
from .icm_algebra import AtomUniverse, GeneratedCongruence, IcmElement
from .genome_env import Alphabet, AlignmentStudy, Diploid, Word, kan_element_images, transport_word, truncate
from .recombination import Chromology, Cone, Descriptor, HaplotypeTuple, check_scheme, haplotype, quotient_class, same_haplotype, segregate
from .analysis import Projection, fiber_components, minimize_markers, predict, separation_check

__version__ = "0.1.0"

__all__ = [
    "BOOLEAN",
    "Alphabet",
    "AlignmentStudy",
    "AtomUniverse",
    "Chromology",
    "Cone",
    "Descriptor",
    "Diploid",
    "GeneratedCongruence",
    "HaplotypeTuple",
    "IcmElement",
    "PreOrder",
    "Projection",
    "Segment",
    "SegmentMorphism",
    "Word",
    "check_morphism",
    "check_scheme",
    "fiber_components",
    "haplotype",
    "kan_element_images",
    "minimize_markers",
    "parse_segment",
    "predict",
    "quotient_class",
    "same_haplotype",
    "segregate",
    "separation_check",
    "transport_word",
    "truncate",
    "unique_quasi_homologous_morphism",
]
