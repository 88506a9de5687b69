"""Exception hierarchy.

Configuration problems and data problems are kept apart because the CLI maps
them onto different exit codes (1 and 2 respectively).
"""


class RiskIndexError(Exception):
    """Base class for every error raised by this package."""

    exit_code = 2


class ConfigError(RiskIndexError):
    exit_code = 1


class DataError(RiskIndexError):
    exit_code = 2


class SchemaError(DataError):
    """A required column is absent, or columns do not match the config."""


class ParseError(DataError):
    def __init__(self, message, path=None, row=None):
        self.path = path
        self.row = row
        where = ""
        if path is not None:
            where += f"{path}"
        if row is not None:
            where += f" row {row}"
        super().__init__(f"{where}: {message}" if where else message)


class DuplicateError(DataError):
    def __init__(self, codes, context=""):
        self.codes = sorted(set(codes))
        prefix = f"{context}: " if context else ""
        super().__init__(f"{prefix}duplicate area codes: {', '.join(self.codes)}")


class CoverageError(DataError):
    """Some areas (or area/indicator cells) are missing."""

    def __init__(self, message, missing=()):
        self.missing = list(missing)
        super().__init__(message)


class MappingError(DataError):
    pass


class DegenerateError(DataError):
    """Input has no spread (constant column, all-equal scores, ...)."""


class CollinearityError(DataError):
    pass


class ShapeError(DataError):
    pass


class AreaLookupError(DataError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else ""
