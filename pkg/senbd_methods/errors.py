# -*- coding: utf-8 -*-
"""Exception hierarchy for senbd_methods

Every error carries a short machine-parseable category string and the exit
code the command line front end reports for it.

Copyright 2018 Aaron Snoswell
"""


class SENBDError(Exception):
    """Base class for all errors raised by this package"""

    category = "error"
    exit_code = 1


class DomainError(SENBDError, ValueError):
    """An argument lies outside the domain of the operation"""

    category = "domain"
    exit_code = 3


class StationarityError(SENBDError):
    """The interaction matrix has spectral radius >= 1"""

    category = "nonstationary"
    exit_code = 4

    def __init__(self, message, rho=None):
        super().__init__(message)
        self.rho = rho


class ConvergenceError(SENBDError):
    """An iterative solver hit its iteration cap

    The last iterate (and residual, where one is defined) is kept so callers
    can inspect how far the solver got.
    """

    category = "convergence"
    exit_code = 5

    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class SchemaError(SENBDError):
    """Input data violates the expected layout"""

    category = "schema"
    exit_code = 6

    def __init__(self, message, row=None, column=None):
        if row is not None:
            message = "row {}, column {}: {}".format(row, column, message)
        super().__init__(message)
        self.row = row
        self.column = column


class ConfigError(SENBDError):
    """A configuration file or override is invalid"""

    category = "config"
    exit_code = 7


class UsageError(SENBDError):
    """Bad command line usage, e.g. an unknown subcommand"""

    category = "usage"
    exit_code = 2


class DataIOError(SENBDError):
    """Reading or writing a file failed"""

    category = "io"
    exit_code = 8
