"""
recurflow

Simulation and numerical verification toolkit for the quadratic convolution
recurrence Lambda_p(x) = (1/p) sum f(p1/p) Lambda_p1(x) Lambda_p2(x): kernel
spectrum and decay exponent, renormalized high-precision simulation, the
linearized system and its stability, and lemma-level bound checks.
"""

__version__ = "1.0.0"
