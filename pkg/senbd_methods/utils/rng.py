# -*- coding: utf-8 -*-
"""Seeded, splittable random streams

All stochastic code in the package takes either a seed or a numpy
Generator. Sub-streams are spawned from a single SeedSequence so results do
not depend on how work is later split over threads or processes.

Copyright 2018 Aaron Snoswell
"""

import zlib
import numpy as np


def make_streams(seed, n, *, key=None):
    """Spawn n independent generators from one seed

    Args:
        seed (int): Root seed for the run
        n (int): Number of sub-streams to spawn

        key (str): Optional extra entropy (e.g. a sector name) mixed into the
            root seed, so a sub-stream follows its line under relabeling

    Returns:
        (list): List of n numpy.random.Generator objects
    """
    entropy = [int(seed)]
    if key is not None:
        entropy.append(zlib.crc32(str(key).encode("utf-8")))
    children = np.random.SeedSequence(entropy).spawn(n)
    return [np.random.default_rng(c) for c in children]


def as_line_streams(rng, d):
    """Normalise a random source to a list of per-line generators

    Args:
        rng (any): An int seed, a single Generator, or a sequence of d
            Generators
        d (int): Number of lines

    Returns:
        (list): List of d Generators. A single Generator is shared by every
            line.
    """
    if isinstance(rng, np.random.Generator):
        return [rng] * d
    if isinstance(rng, (int, np.integer)):
        return make_streams(rng, d)
    streams = list(rng)
    assert len(streams) == d, \
        "Expected {} per-line streams, got {}".format(d, len(streams))
    return streams
