"""Black-box overlap estimation for fidelity certification.

Simulates displaced-parity measurements on continuous-variable states and
Pauli measurements on qubit states, and checks the sample-complexity laws
driven by the smoothed L1-norm of Wigner and characteristic functions.
"""

__version__ = "1.0.0"
