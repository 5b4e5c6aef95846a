"""Abelian S-ramification toolkit.

Computes, for a number field K, a prime p and each subset S of the primes
above p, the structure of the S-ramified abelian pro-p Galois group via
ray class groups of moduli (prod of p-primes)^n, together with independent
formula-based cross-checks and a fast p-rationality scanner for real
quadratic fields.
"""

__version__ = "0.1.0"
