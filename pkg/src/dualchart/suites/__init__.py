"""
Experiment suites and the runner that executes them.
"""
