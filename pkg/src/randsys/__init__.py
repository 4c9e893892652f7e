"""Random hyperbolic surfaces with large systole, glued from ideal triangles."""

from .words import trace, word_matrix, geodesic_length
from .surface import TriangulatedSurface, systole, enumerate_short_geodesics

__all__ = [
    "trace",
    "word_matrix",
    "geodesic_length",
    "TriangulatedSurface",
    "systole",
    "enumerate_short_geodesics",
]
