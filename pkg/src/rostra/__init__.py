"""rostra: two-stage nurse rostering (nights first, human edits, then days)."""

__version__ = "0.1.0"
