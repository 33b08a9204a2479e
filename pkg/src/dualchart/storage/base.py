"""
Storage errors shared by the ledger backends.
"""
from dualchart.exceptions import DualChartError


class StorageError(DualChartError):
    """Base exception for storage-related errors."""
    pass
