"""Arithmetic constraints on prime factors of class numbers of cyclic fields."""

__version__ = "0.1.0"
