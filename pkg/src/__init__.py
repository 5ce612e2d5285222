"""
Subgroup OFDM Estimation
OFDM link simulator with energy-constrained subgroup channel estimation.
"""

__version__ = "1.0.0"
__author__ = "BalenciCash"
