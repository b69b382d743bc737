"""Figure rendering for netisac result CSVs (no in-process coupling)."""

__version__ = "0.1.0"
