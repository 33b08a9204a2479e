"""
Report writers and console presentation for experiment runs.
"""
