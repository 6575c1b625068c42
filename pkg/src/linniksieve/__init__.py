"""Sieve and L-function toolkit for primes in ideal classes of Q(sqrt(-D))."""

__version__ = "0.1.0"
