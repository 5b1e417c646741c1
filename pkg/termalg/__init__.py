"""Term algebra calculus: positions, compositions, essentiality and deduction."""

__version__ = "0.1.0"
