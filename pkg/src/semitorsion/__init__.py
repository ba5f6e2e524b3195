"""Exact computations with projective presentations, tropical F-polynomials
and semistable torsion classes of bound quiver algebras."""
