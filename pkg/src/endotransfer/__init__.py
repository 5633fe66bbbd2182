"""Exact computations around classical and renormalized transfer for real groups.

Submodules: ``lattice`` (root data, Weyl groups, lattice quotients), ``torus``
(characters of real tori), ``packets`` (parameters and packets), ``components``
(component groups and pairing tables), ``factors`` (symbolic transfer-factor
identities), ``harness`` (finite transfer-duality models), ``catalog`` and
``cli``.
"""

__version__ = "0.1.0"
