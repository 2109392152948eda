"""
qdist: a desk-scale verification lab for distance sets over finite fields.

Exact field arithmetic, Gauss and Kloosterman sums, Fourier transforms on
F_q^d, spherical restriction masses and distance-set statistics, each checked
against a brute-force computation and reported as a CheckReport.
"""

__version__ = "0.1.0"
