"""
Static Abelian connections on a lattice: covariant derivatives, curvature, holonomy.
"""
