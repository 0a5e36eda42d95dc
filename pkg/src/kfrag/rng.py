"""Random sources.

The default source is the operating system CSPRNG (``random.SystemRandom``),
which is required for permutation secrecy.  A seeded Mersenne-Twister source
can be forced through ``FRAG_RNG_SEED`` for reproducible runs; it is meant
for tests and golden files only and must never be used to protect real data.
"""

from __future__ import annotations

import os
import random

ENV_SEED = "FRAG_RNG_SEED"


def make_rng(seed: int | None = None) -> random.Random:
    """Return a CSPRNG, or a seeded PRNG when a seed is given (test-only)."""
    if seed is None:
        return random.SystemRandom()
    return random.Random(seed)


def rng_from_env() -> random.Random:
    """Honor FRAG_RNG_SEED if set, otherwise return the system CSPRNG."""
    raw = os.environ.get(ENV_SEED)
    if raw is None:
        return make_rng()
    return make_rng(int(raw))
