"""Exception hierarchy.

Everything raised deliberately by the package derives from ``HomographError``.
``DataError`` marks problems with user-supplied inputs (files, models,
domains); the CLI maps those to exit code 2.
"""


class HomographError(Exception):
    pass


class ConfigError(HomographError, ValueError):
    pass


class DataError(HomographError):
    pass


class FontLoadError(DataError):
    pass


class DimensionMismatch(DataError, ValueError):
    pass


class UndefinedForLengthMismatch(DataError, ValueError):
    pass


class EmptyCorpus(DataError, ValueError):
    pass


class SchemaMismatch(DataError):
    pass


class ParseError(DataError, ValueError):
    def __init__(self, message, line=None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class SchemaError(ParseError):
    pass


class PunycodeError(DataError, ValueError):
    pass


class NoConfusableCoverage(DataError, ValueError):
    pass


class DegenerateLabels(DataError, ValueError):
    pass


class VersionError(DataError):
    pass


class InvalidK(ConfigError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class EmptyInput(DataError, ValueError):
    pass
