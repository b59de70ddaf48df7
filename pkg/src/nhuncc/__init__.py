"""Noisy hybrid universal network coding: binned codebooks, partial encryption, GRAND decoding."""

__version__ = "0.1.0"
