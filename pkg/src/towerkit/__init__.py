"""Exactly verified tower combinatorics on the Cantor-Lebesgue line.

Modules, bottom up:

- :mod:`towerkit.exactnum`: rationals and intervals
- :mod:`towerkit.setalg`: ultimately periodic subsets of omega, towers, point minting
- :mod:`towerkit.cantor`: the map ``Y -> sum 2^-(n+1)`` and good-at-n intervals
- :mod:`towerkit.poset`: finite partial order-isomorphisms and schedules
- :mod:`towerkit.mainlemma`: containment certificates and pseudointersection witnesses
- :mod:`towerkit.medini`: bit-fixing conditions with permutations of level-n strings
- :mod:`towerkit.decomp`: maximal intervals and gluing isomorphisms
- :mod:`towerkit.report` and :mod:`towerkit.cli`: scenarios, reports, re-verification
"""

__version__ = "0.1.0"
