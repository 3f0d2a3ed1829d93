from numbers import Integral

import numpy as np
from numpy.random import Generator, SeedSequence

from tsblind.utils.types import RngTypes

# Master seeds are 64-bit.
MAX_SEED = 2**64


def check_generator(seed_or_rng: RngTypes, seed_allowed: bool = True) -> Generator:  # type: ignore
    """Turn seed into a np.random.Generator instance.

    Parameters
    ----------
    seed_or_rng : int, Generator, or None
        If seed_or_rng is None, return a freshly seeded Generator.
        If seed_or_rng is an int, return a new Generator instance seeded with seed_or_rng.
        If seed_or_rng is already a Generator instance, return it.
        Otherwise raise ValueError.

    seed_allowed : bool, optional
        If True, seed_or_rng can be an int. If False, seed_or_rng cannot be an int.
        Default is True.

    Returns
    -------
    Generator
        A numpy.random.Generator instance.

    Raises
    ------
    ValueError
        If seed_or_rng is not None, an int, or a numpy.random.Generator instance.
        If seed_or_rng is an int and seed_allowed is False.
        If seed_or_rng is an int and it is not between 0 and 2**64 - 1.
    """
    if seed_or_rng is None:
        return np.random.default_rng()
    if isinstance(seed_or_rng, Generator):
        return seed_or_rng
    if seed_allowed and isinstance(seed_or_rng, Integral):
        if not (0 <= seed_or_rng < MAX_SEED):  # type: ignore
            raise ValueError(
                f"The random seed must be between 0 and 2**64 - 1. Got {seed_or_rng}"
            )
        return np.random.default_rng(int(seed_or_rng))

    raise ValueError(
        f"{seed_or_rng} cannot be used to seed a numpy.random.Generator instance"
    )


def replication_rng(
    master_seed: Integral, *stream_key: Integral
) -> Generator:
    """
    Derive the generator of one replication from the master seed.

    The stream of replication ``i`` at grid point ``n`` is
    ``default_rng(SeedSequence(master_seed, spawn_key=(n, i)))``. The mapping
    depends only on its arguments, so serial and parallel runs draw identical
    ensembles.

    Parameters
    ----------
    master_seed : Integral
        Master seed, 0 <= master_seed < 2**64.
    *stream_key : Integral
        Non-negative integers identifying the stream, e.g. ``(n, i)``.

    Returns
    -------
    Generator
        A PCG64-backed numpy.random.Generator.
    """
    if not (0 <= master_seed < MAX_SEED):
        raise ValueError(
            f"The random seed must be between 0 and 2**64 - 1. Got {master_seed}"
        )
    if any(k < 0 for k in stream_key):
        raise ValueError(f"Stream keys must be non-negative. Got {stream_key}")
    seq = SeedSequence(
        int(master_seed), spawn_key=tuple(int(k) for k in stream_key)
    )
    return np.random.default_rng(seq)
