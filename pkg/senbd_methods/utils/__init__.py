# -*- coding: utf-8 -*-
"""__init__.py for the senbd_methods.utils module

This submodule contains the kernels, random streams, parameter transforms
and solvers shared by the model-level modules.

Copyright 2018 Aaron Snoswell
"""

from .basis import geometric, exponential, exponential_matrix
from .dacadc import dac, discrete_decay_rate
from .fixed_point import fixed_point
from .rng import make_streams, as_line_streams
from .transform import make_box_transform

# rollout imports the process module, which imports this package, so it is
# imported from senbd_methods.utils.rollout directly

# We want direct access to everything in utils, so add the individual objects
#  to the __all__ list here
__all__ = [
    "geometric", "exponential", "exponential_matrix",
    "dac", "discrete_decay_rate",
    "fixed_point",
    "make_streams", "as_line_streams",
    "make_box_transform"
]
