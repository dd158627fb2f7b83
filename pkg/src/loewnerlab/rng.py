"""Counter-based random number streams for reproducible path ensembles.

Every path in an ensemble owns an independent Philox stream keyed by
``(seed, path_index)``; the position inside the stream plays the role of the
step index.  Because Philox is counter-based, a path's increments depend only
on its own key and draw order, never on how many other paths ran before it or
on thread scheduling.
"""

import numpy as np

_MASK64 = 0xFFFFFFFFFFFFFFFF


def path_rng(seed, path_index=0):
    """Return a ``numpy.random.Generator`` for one path of one ensemble.

    Parameters
    ----------
    seed : int
        Master seed of the run (reduced modulo 2**64).
    path_index : int
        Index of the path within the ensemble (reduced modulo 2**64).
    """
    key = np.array([int(seed) & _MASK64, int(path_index) & _MASK64],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def gaussian_increments(seed, path_index, n, dt=1.0):
    """Draw ``n`` i.i.d. N(0, dt) increments for the given path stream."""
    out = path_rng(seed, path_index).standard_normal(n)
    if dt != 1.0:
        out *= np.sqrt(dt)
    return out
