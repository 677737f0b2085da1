"""Deterministic seed derivation for role-tagged RNG substreams.

Every simulation owns its generators: a master seed plus a tag path (for
example ``("run", 3, "defender")``) maps to an independent substream, so
adding a consumer never perturbs the draws of existing ones and results are
reproducible across platforms.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master: int, *tags: object) -> int:
    """Hashes (master, tags...) into a 64-bit seed."""
    payload = repr((int(master),) + tags).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "big")


def substream(master: int, *tags: object) -> np.random.Generator:
    """Returns a fresh generator for the given role tags."""
    return np.random.default_rng(derive_seed(master, *tags))
