import hashlib

import numpy as np


def derive_seed(master: int, *labels) -> int:
    """Deterministic 63-bit seed for a labeled sub-stream of ``master``."""
    text = "\x1f".join([str(int(master))] + [str(x) for x in labels])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def rng_for(master: int, *labels) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master, *labels))
