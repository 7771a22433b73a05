"""Finite duality between left-handed strongly distributive skew lattices with
zero and bundles of finite sets over finite posets."""

from .algebra import FiniteSkewLattice, SkewHom, validate
from .bundles import Bundle, Section, SheafMorphism
from .duality import dual_bundle, phi, psi, realize_section, star_of_bundle, star_of_morphism, unstar_hom
from .order import FinitePoset

__version__ = "0.1.0"

__all__ = [
    "Bundle",
    "FinitePoset",
    "FiniteSkewLattice",
    "Section",
    "SheafMorphism",
    "SkewHom",
    "dual_bundle",
    "phi",
    "psi",
    "realize_section",
    "star_of_bundle",
    "star_of_morphism",
    "unstar_hom",
    "validate",
]
