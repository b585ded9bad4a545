"""Inhomogeneous quasi-adiabatic driving of weakly disordered transverse-field Ising chains.

The chain ``H = -sum J_n X_n X_{n+1} - sum g_n Z_n`` is solved as a free-fermion
(Majorana) problem: static spectra through the canonical Bogoliubov form, real-time
dynamics through a fourth-order product of exact planar rotations.
"""

__version__ = "0.1.0"
