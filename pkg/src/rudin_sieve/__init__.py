"""Sieve majorants, dissociate sets and large-sieve type inequalities."""

__version__ = "0.1.0"

from .circle import (
    CirclePoint,
    PointSet,
    circle_norm,
    delta_star,
    delta_star_arith,
    greedy_dissociate,
    is_dissociate,
    min_gap,
    parse_points,
)
from .expsum import SupportedFunction, spectrum, trig_poly, trig_poly_all
from .prime_sieve import build_prime_sieve, g_prime
from .square_sieve import build_square_sieve, g_sharp, g_sharp_scan

__all__ = [
    "CirclePoint",
    "PointSet",
    "SupportedFunction",
    "build_prime_sieve",
    "build_square_sieve",
    "circle_norm",
    "delta_star",
    "delta_star_arith",
    "g_prime",
    "g_sharp",
    "g_sharp_scan",
    "greedy_dissociate",
    "is_dissociate",
    "min_gap",
    "parse_points",
    "spectrum",
    "trig_poly",
    "trig_poly_all",
]
