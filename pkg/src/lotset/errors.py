"""Exception hierarchy.

Three branches matter to callers (and to the CLI exit codes): ConfigError
for bad configuration or infeasible requests, DataError for malformed or
inconsistent inputs, NumericError for failures inside the math.
"""


class LotsetError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(LotsetError):
    pass


class DataError(LotsetError):
    pass


class NumericError(LotsetError):
    pass


# point sets and datasets
class EmptyPointSet(DataError):
    pass


class DimensionZero(DataError):
    pass


class NonFiniteCoordinate(DataError):
    pass


class InvalidPermutation(DataError):
    pass


class CardinalityMismatch(DataError):
    pass


class DimensionMismatch(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class ReferenceMismatch(DataError):
    pass


class EmptyClass(DataError):
    pass


class TooFewPoints(DataError):
    pass


# file formats
class ParseError(DataError):
    pass


class RaggedRows(DataError):
    pass


class EmptyFile(DataError):
    pass


class MissingFile(DataError):
    pass


class LabelGap(DataError):
    pass


class IoError(DataError):
    pass


class VersionMismatch(DataError):
    pass


class ChecksumMismatch(DataError):
    pass


# configuration
class InfeasibleSplit(ConfigError):
    pass


# numerics
class ConvergenceFailure(NumericError):
    pass


class NonOrthonormalBasis(NumericError):
    pass


class ZeroMatrix(NumericError):
    pass


class SingularDraw(NumericError):
    pass


class SingularMap(NumericError):
    pass


class DegenerateInput(NumericError):
    pass
