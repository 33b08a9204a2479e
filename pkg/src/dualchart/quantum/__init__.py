"""
Truncated Hilbert-space realizations, density evolution and trajectory densities.
"""
