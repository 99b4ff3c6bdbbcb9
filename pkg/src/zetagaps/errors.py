"""Exception hierarchy.

Every error carries a ``category`` used by the command line to pick an exit
status: ``CONFIG`` (bad input or parameters), ``NUMERIC`` (an evaluation or
verification step could not be completed) or ``IO``.
"""


class ZetaGapsError(Exception):
    category = "NUMERIC"
    code = "ERROR"


class DomainError(ZetaGapsError, ValueError):
    category = "CONFIG"
    code = "DOMAIN"


class ConfigError(ZetaGapsError, ValueError):
    category = "CONFIG"
    code = "CONFIG"


class NumericError(ZetaGapsError):
    category = "NUMERIC"
    code = "NUMERIC"


class Unresolved(NumericError):
    code = "UNRESOLVED"


class NonInteger(NumericError):
    code = "NONINTEGER"


class StepFail(NumericError):
    code = "STEP_FAIL"


class NoConvergence(NumericError):
    code = "NO_CONVERGENCE"


class Oscillation(NumericError):
    code = "OSCILLATION"


class MultipleCandidates(NumericError):
    code = "MULTIPLE_CANDIDATES"


class CountMismatch(NumericError):
    code = "COUNT_MISMATCH"


class CutoffExceeded(NumericError):
    code = "CUTOFF_EXCEEDED"


class GapInIndices(NumericError):
    code = "GAP_IN_INDICES"


class NonpositiveNorm(DomainError):
    code = "NONPOSITIVE_NORM"


class IngestError(ZetaGapsError):
    category = "IO"
    code = "IO"


class MalformedLine(IngestError):
    code = "MALFORMED_LINE"

    def __init__(self, lineno, text):
        super().__init__(f"line {lineno}: cannot parse {text!r}")
        self.lineno = lineno
        self.text = text


class NonMonotone(IngestError):
    code = "NON_MONOTONE"

    def __init__(self, lineno, previous, current):
        super().__init__(
            f"line {lineno}: ordinate {current!r} does not exceed previous {previous!r}")
        self.lineno = lineno
        self.previous = previous
        self.current = current


class CheckpointMismatch(ConfigError):
    code = "CHECKPOINT_MISMATCH"


EXIT_CODES = {"CONFIG": 2, "NUMERIC": 3, "IO": 4}


def exit_code(exc):
    """Exit status for an exception raised inside a command."""
    if isinstance(exc, ZetaGapsError):
        return EXIT_CODES[exc.category]
    if isinstance(exc, OSError):
        return EXIT_CODES["IO"]
    if isinstance(exc, ValueError):
        return EXIT_CODES["CONFIG"]
    return EXIT_CODES["NUMERIC"]
