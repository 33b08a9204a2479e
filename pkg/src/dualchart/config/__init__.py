"""
Scenario configuration.
"""
