"""Exact construction and certification of unextendible product bases from tile structures."""

__version__ = "0.1.0"
