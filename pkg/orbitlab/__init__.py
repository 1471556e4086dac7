"""
orbitlab - exact and p-adic experiments in arithmetic dynamics.

Number fields, p-adic local dynamics, Tate-series attractors, map
classification and degree-bounded density experiments for endomorphisms
of P1, P2 and (P1)^N over number fields.
"""

from .__version__ import __version__

VERSION = __version__
__description__ = "Exact and p-adic experiments in arithmetic dynamics"
