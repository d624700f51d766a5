"""Exact operator models of quiver double Hecke algebras and their finite quotients."""

from .rootsys import AffineRoot, AffineRootSystem, FiniteRootSystem, affinise, build_finite
from .weyl import AffineWeylElement, AffineWeylGroup, FiniteWeylGroup
from .polyring import Poly, RatFunc

__all__ = [
    "AffineRoot",
    "AffineRootSystem",
    "AffineWeylElement",
    "AffineWeylGroup",
    "FiniteRootSystem",
    "FiniteWeylGroup",
    "Poly",
    "RatFunc",
    "affinise",
    "build_finite",
]
