"""
Puiseux monoid family modules for atomcraft.

Each module exports ``normalize(**params)``, ``generators(count, **params)`` and
``ATOM_SET`` (None when no closed form is known), and optionally
``chain_step(n, **params)`` for families whose principal ideals ascend forever.
Use :func:`atomcraft.load_family` to load families by name.
"""
