import hashlib
import json

import numpy as np


def derive_seed(seed: int, *keys) -> int:
    """64-bit seed from a base seed and hashable keys (order independent of
    evaluation order, stable across runs)."""
    payload = json.dumps([int(seed), [_plain(k) for k in keys]], separators=(",", ":"))
    return int.from_bytes(hashlib.blake2b(payload.encode(), digest_size=8).digest(), "little")


def rng_for(seed: int, *keys) -> np.random.Generator:
    return np.random.default_rng(derive_seed(seed, *keys))


def _plain(k):
    if isinstance(k, (tuple, list, np.ndarray)):
        return [_plain(x) for x in k]
    if isinstance(k, (np.integer,)):
        return int(k)
    return k
