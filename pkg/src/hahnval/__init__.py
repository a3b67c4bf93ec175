"""Exact valued-field machinery over Hahn sums and truncated Hahn series."""

__version__ = "0.1.0"
