"""
Pulse compiler and simulator for symmetric Dicke-subspace state synthesis
"""
__version__ = "1.0.0"
