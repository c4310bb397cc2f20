"""Exact-arithmetic tools for the height-2 Morava stabilizer group at p=3.

Subpackages cover: truncated Witt-ring arithmetic (witt), the order O_2 and
its unit groups with finite-subgroup machinery (group), a truncated Honda
formal-group-law oracle (fgl), monomial models of the finite-resolution
spectral sequence (e1, d1, e2), and chart assembly with report emission
(charts, cli).
"""

__version__ = "0.1.0"
