# fdelie/errors.py
# FDE-Lie : Lie point symmetries of functional differential equations
# Exceptions raised by the library; the CLI maps them to exit codes.


class FdeLieError(Exception):
    """Base class for every error raised by fdelie."""


class DslSyntaxError(FdeLieError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnboundIndexError(FdeLieError):
    def __init__(self, name):
        super().__init__(f"index '{name}' is not bound by an integral and not declared free")
        self.name = name


class DistributionError(FdeLieError):
    """Products of coincident deltas and other distributions outside the calculus."""


class ScopeError(FdeLieError):
    """Requests outside the supported scope (order > 2, r > 1, p > 1, delta derivatives)."""


class MissingZetaError(FdeLieError):
    def __init__(self, slot):
        super().__init__(f"no prolongation coefficient available for jet slot {slot}")
        self.slot = slot


class UnboundParameterError(FdeLieError):
    def __init__(self, name):
        super().__init__(f"parameter '{name}' has no numeric binding")
        self.name = name


class NonFiniteStateError(FdeLieError):
    """A flow or an evaluation produced NaN or inf."""


class InvalidFixtureError(FdeLieError):
    def __init__(self, path, reason):
        super().__init__(f"invalid fixture '{path}': {reason}")
        self.path = path
        self.reason = reason


class EmptyGeneratorError(FdeLieError):
    """All infinitesimals vanish, or an empty generator list was given."""
