"""Categories of two-colored partitions and their cube of vertex categories."""

__version__ = "0.1.0"
