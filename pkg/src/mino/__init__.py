"""mino: symbolic full-normalization calculus and verification harness."""

__version__ = "0.1.0"
