"""Exception hierarchy.

Every error carries a short ``code`` so the command line can print a
single machine-parseable line.
"""


class WPError(Exception):
    code = "Error"

    def __init__(self, message="", **context):
        super().__init__(message)
        self.context = context


class DimensionMismatch(WPError, ValueError):
    code = "DimensionMismatch"


class LengthMismatch(WPError, ValueError):
    code = "LengthMismatch"


class ZeroVector(WPError, ValueError):
    code = "ZeroVector"


class NonFinite(WPError, ValueError):
    code = "NonFinite"


class TooLarge(WPError, ValueError):
    code = "TooLarge"


class NonOrthogonal(WPError, ValueError):
    code = "NonOrthogonal"


class NonOrthogonalInit(NonOrthogonal):
    code = "NonOrthogonalInit"


class InvalidPermutation(WPError, ValueError):
    code = "InvalidPermutation"


class InvalidSeedIndex(WPError, ValueError):
    code = "InvalidSeedIndex"


class DuplicateSeed(WPError, ValueError):
    code = "DuplicateSeed"


class InvalidK(WPError, ValueError):
    code = "InvalidK"


class InvalidConfig(WPError, ValueError):
    code = "InvalidConfig"


class EmptyIntersection(WPError, ValueError):
    code = "EmptyIntersection"


class InvalidDictionary(WPError, ValueError):
    code = "InvalidDictionary"


class InvalidSpec(WPError, ValueError):
    code = "InvalidSpec"


class InsufficientSharedVocabulary(WPError, ValueError):
    code = "InsufficientSharedVocabulary"


class NoResolvableSeeds(WPError, ValueError):
    code = "NoResolvableSeeds"


class IoFailure(WPError, OSError):
    code = "IoFailure"


class FormatError(WPError, ValueError):
    """Base for parse errors. ``line`` is 1-based, or None."""

    code = "FormatError"

    def __init__(self, message="", line=None, **context):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message, **context)
        self.line = line


class MalformedHeader(FormatError):
    code = "MalformedHeader"


class DimensionMismatchAtLine(FormatError):
    code = "DimensionMismatchAtLine"


class NonNumericValue(FormatError):
    code = "NonNumericValue"


class NonFiniteValue(FormatError):
    code = "NonFiniteValue"


class CountMismatch(FormatError):
    code = "CountMismatch"


class MalformedLine(FormatError):
    code = "MalformedLine"


class EmptyDictionary(FormatError):
    code = "EmptyDictionary"


class MalformedMatrix(FormatError):
    code = "MalformedMatrix"
