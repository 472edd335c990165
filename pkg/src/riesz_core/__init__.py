"""
Riesz Core - exact finite Riesz spaces, partitions and conditional expectations.

This package is the kernel the theorem checkers in ``riesz_probability`` and
the harness in ``riesz_verifier`` are built on.
"""

from .condexp import ConditionalExpectation, condexp_onto, freudenthal
from .errors import DomainError, ResourceCapError, RieszError, StructuralError
from .partitions import Partition, enumerate_band_projections, generated_partition, join, refines
from .settings import Settings
from .space import BandProjection, RieszElement, SampleSpace, band_projection_of, e_mul

__all__ = [
    "BandProjection",
    "ConditionalExpectation",
    "DomainError",
    "Partition",
    "ResourceCapError",
    "RieszElement",
    "RieszError",
    "SampleSpace",
    "Settings",
    "StructuralError",
    "band_projection_of",
    "condexp_onto",
    "e_mul",
    "enumerate_band_projections",
    "freudenthal",
    "generated_partition",
    "join",
    "refines",
]
