"""
Optional SQLite run ledger recording the outcome of each run.
"""
