"""
dualchart: numerical laboratory for the (q, π) / (𝒬, p) charts of a particle
coupled to an Abelian gauge field.
"""

__version__ = "0.1.0"
