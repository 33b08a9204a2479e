"""
Utility modules for dualchart.
"""
