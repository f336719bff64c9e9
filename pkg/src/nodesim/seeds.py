"""Stable seed derivation so every pipeline stage gets an independent stream."""

import hashlib


def derive_seed(*parts) -> int:
    """Mix arbitrary parts (ints, strings) into a 31-bit seed.

    SHA-256 based, so the result is stable across processes and platforms,
    unlike the builtin ``hash``. Keeping the result in the 31-bit range makes
    it valid for every RNG we use (``random.Random``, numpy, numba).
    """
    payload = "\x1f".join(str(p) for p in parts).encode()
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:4], "little") & 0x7FFFFFFF
