"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class Su2LimitsError(Exception):
    exit_code = 1


class ParseError(Su2LimitsError, ValueError):
    exit_code = 2


class StateError(Su2LimitsError, ValueError):
    """Invalid state construction or incompatible states."""

    exit_code = 2


class UnnormalizableError(StateError):
    exit_code = 3


class PhotonNumberMismatch(StateError):
    exit_code = 4


class OutputError(Su2LimitsError, OSError):
    exit_code = 5
