"""Deterministic seed derivation.

One master seed is split into independent streams keyed by a path of
integers and strings (run index, tree index, a role tag, ...). Derivation
is counter based, so a stream's state does not depend on how many sibling
streams were consumed before it: serial and parallel execution see
identical randomness.
"""
from __future__ import annotations

import hashlib
from typing import Union

import numpy as np

PathPart = Union[int, str]


def _key(path: tuple[PathPart, ...]) -> tuple[int, ...]:
    out = []
    for part in path:
        if isinstance(part, bool) or not isinstance(part, (int, str)):
            raise TypeError(f"seed path parts must be int or str, got {part!r}")
        if isinstance(part, str):
            digest = hashlib.sha256(part.encode("utf-8")).digest()
            out.append(int.from_bytes(digest[:4], "big"))
        else:
            if part < 0:
                raise ValueError(f"seed path ints must be >= 0, got {part}")
            out.append(int(part))
    return tuple(out)


def derive_seed(master: int, *path: PathPart) -> int:
    """Return a 63-bit seed for the stream at ``path`` under ``master``."""
    ss = np.random.SeedSequence(master, spawn_key=_key(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> 1)


def spawn_rng(master: int, *path: PathPart) -> np.random.Generator:
    """Return an independent Generator for the stream at ``path``."""
    return np.random.default_rng(np.random.SeedSequence(master, spawn_key=_key(path)))
