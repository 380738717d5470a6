"""Seed derivation and random streams.

Every random object in the package is drawn from a Philox (counter-based)
generator keyed by a master seed plus a tuple of purpose tags, so that
independent consumers never share a stream and any single object can be
regenerated in isolation.
"""

from __future__ import annotations

import hashlib

import numpy as np

__all__ = ["derive_seed", "stream", "tag_word"]


def tag_word(tag: int | str) -> int:
    """Map a tag to a 32-bit word; strings hash stably across processes."""
    if isinstance(tag, (int, np.integer)):
        if tag < 0:
            raise ValueError(f"negative tag {tag}")
        return int(tag)
    digest = hashlib.blake2b(tag.encode(), digest_size=4).digest()
    return int.from_bytes(digest, "little")


def _seed_sequence(seed: int, tags: tuple[int | str, ...]) -> np.random.SeedSequence:
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    return np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(tag_word(t) for t in tags))


def stream(seed: int, *tags: int | str) -> np.random.Generator:
    """Independent generator for ``(seed, *tags)``."""
    return np.random.Generator(np.random.Philox(_seed_sequence(seed, tags)))


def derive_seed(seed: int, *tags: int | str) -> int:
    """Derive a 63-bit child seed, e.g. for one trial of an experiment."""
    words = _seed_sequence(seed, tags).generate_state(2, dtype=np.uint32)
    return (int(words[0]) | (int(words[1]) << 32)) & ((1 << 63) - 1)
