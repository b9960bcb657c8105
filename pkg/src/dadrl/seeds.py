"""Deterministic seed derivation for workers, evaluation, and samplers."""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(root, *tags):
    """Stable 63-bit seed from a root seed and a tag path (sha256-based)."""
    text = ":".join([str(int(root))] + [str(t) for t in tags])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def derive_rng(root, *tags):
    return np.random.default_rng(derive_seed(root, *tags))
