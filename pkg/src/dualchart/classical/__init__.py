"""
Classical theory: extended phase space, bracket engine and dual-chart dynamics.
"""
