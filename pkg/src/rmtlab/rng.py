"""Counter-based random streams keyed by (master_seed, labels).

Every consumer gets its own Philox stream whose key is derived from the
master seed and a tuple of labels, so results never depend on the order
in which consumers run.
"""

import hashlib

import numpy as np

_MASK64 = (1 << 64) - 1


def _label_word(label):
    if isinstance(label, (bool, np.bool_)):
        return int(label)
    if isinstance(label, (int, np.integer)) and label >= 0:
        return int(label)
    digest = hashlib.blake2b(repr(label).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def _seed_sequence(master_seed, labels):
    return np.random.SeedSequence(
        entropy=int(master_seed) & _MASK64,
        spawn_key=tuple(_label_word(lab) for lab in labels),
    )


def stream(master_seed, *labels):
    """Return an independent ``numpy.random.Generator`` for the given key.

    Labels may be non-negative integers or anything with a stable ``repr``
    (strings, floats); the same key always yields the same stream.
    """
    return np.random.Generator(np.random.Philox(_seed_sequence(master_seed, labels)))


def derive_seed(master_seed, *labels):
    """Deterministic 64-bit child seed, for handing to another config."""
    words = _seed_sequence(master_seed, labels).generate_state(2, dtype=np.uint32)
    return (int(words[1]) << 32) | int(words[0])
