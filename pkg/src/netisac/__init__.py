"""Network-level ISAC interference modeling and mitigation-design toolkit."""

__version__ = "0.1.0"
