# -*- coding: utf-8 -*-
"""
Simple fixed-point iteration

Copyright 2018 Aaron Snoswell
"""

import logging
import math
import numpy as np

from ..errors import ConvergenceError


logger = logging.getLogger(__name__)


def fixed_point(
        update,
        x0,
        *,
        tol=1e-12,
        max_iterations=None,
        name="fixed point"
):
    """Iterate x <- update(x) until successive iterates agree

    Args:
        update (function): Map from an iterate to the next iterate. Scalars
            and numpy arrays are both supported.
        x0 (any): Starting iterate

        tol (float): Stopping tolerance - when no entry changes by more than
            this (sup norm), iteration stops
        max_iterations (int): Maximum iterations, or None to run until
            convergence
        name (str): Label used in log and error messages

    Returns:
        (any): The final iterate
        (int): Number of iterations taken
    """

    max_iterations = max_iterations if max_iterations is not None \
        else math.inf

    x = x0
    i = 0
    while True:
        i += 1

        x_new = update(x)
        delta = float(np.max(np.abs(np.asarray(x_new) - np.asarray(x)))) \
            if np.size(x_new) else 0.0
        x = x_new

        if delta < tol:
            break

        if i >= max_iterations:
            raise ConvergenceError(
                "{} did not converge in {} iterations (last change "
                "{:.3e})".format(name, i, delta),
                last_iterate=x,
                residual=delta
            )

    logger.debug("%s converged in %d iterations", name, i)
    return x, i
