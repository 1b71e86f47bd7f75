"""Double-STIRAP geometric phase gates on Rydberg-blockaded neutral atoms."""

__version__ = "0.1.0"
