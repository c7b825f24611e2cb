"""Named random substreams derived from a single 64-bit seed.

Every random decision in the package flows through ``substream``, so a run
is fully determined by one seed plus the (documented) tag path of each
consumer. Tags are hashed position-wise with blake2b into 64-bit words and
fed to numpy's SeedSequence together with the base seed, which keeps the
streams independent and reproducible across platforms.
"""

import hashlib

import numpy as np


def _tag_word(position: int, tag) -> int:
    digest = hashlib.blake2b(f"{position}|{tag}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(seed: int, *tags) -> np.random.Generator:
    """Return a Generator for the substream named by ``tags`` under ``seed``."""
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF]
    entropy.extend(_tag_word(i, t) for i, t in enumerate(tags))
    return np.random.default_rng(np.random.SeedSequence(entropy))
