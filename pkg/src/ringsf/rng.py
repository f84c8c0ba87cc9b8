"""Deterministic seed derivation.

All randomness in the package flows through 64-bit seeds derived with a
splitmix64 hash, never from OS entropy.  This keeps disorder realizations,
trajectory noise, and optimizer scatter reproducible bit-for-bit, and lets
the optimizer reuse common random numbers across objective evaluations.
"""

from __future__ import annotations

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64(state: int) -> int:
    """One splitmix64 step: hash a 64-bit integer to a 64-bit integer."""
    z = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return (z ^ (z >> 31)) & _MASK64


def derive_seed(master_seed: int, *indices: int) -> int:
    """Derive a child seed from a master seed and an index path.

    Successive splitmix64 steps fold in each index, so ``derive_seed(s, k)``
    and ``derive_seed(s, k, j)`` give independent, reproducible streams.
    """
    state = splitmix64(master_seed & _MASK64)
    for idx in indices:
        state = splitmix64((state ^ (idx & _MASK64)) & _MASK64)
    return state


def generator(seed: int) -> np.random.Generator:
    """PCG64 generator for a derived 64-bit seed."""
    return np.random.Generator(np.random.PCG64(seed & _MASK64))
