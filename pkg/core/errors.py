# Omega Engine - Errors
# Exception hierarchy; each family carries the CLI exit code it maps to


class OmegaError(Exception):
    exit_code = 1


class InputError(OmegaError, ValueError):
    """Malformed or unusable input data."""

    exit_code = 2


class ConfigError(OmegaError):
    """Invalid run configuration."""

    exit_code = 3


class CapExceeded(OmegaError):
    """A size guard of an exponential routine was exceeded."""

    exit_code = 4


# ============= TREES =============

class TreeError(InputError):
    pass


class NotConnected(TreeError):
    pass


class CycleDetected(TreeError):
    pass


class WrongEdgeCount(TreeError):
    pass


class VertexOutOfRange(TreeError):
    pass


class DuplicateEdge(TreeError):
    pass


# ============= ARRANGEMENTS AND BASELINES =============

class SizeMismatch(InputError):
    pass


class TooLarge(CapExceeded):
    pass


class UnsupportedClass(InputError):
    pass


class BadArgs(InputError):
    pass


class Degenerate(InputError):
    pass


# ============= SCORES =============

class UndefinedForShort(InputError):
    pass


class ZeroVariance(InputError):
    pass


class BadRoot(InputError):
    pass


class EmptyGroup(InputError):
    pass


# ============= STATISTICS =============

class EmptyCorpus(InputError):
    pass


class EmptySample(InputError):
    pass


class TooFewStrata(InputError):
    pass


class InconsistentInput(InputError):
    pass


# ============= TREEBANKS =============

class MalformedLine(InputError):
    def __init__(self, line_no: int, message: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {message}" if message else f"line {line_no}")


class NonTreeHeads(InputError):
    pass


class MultipleRoots(InputError):
    pass


class AllTokensDeleted(InputError):
    pass


class MixedLanguages(InputError):
    pass


class NoCommonSentences(InputError):
    pass
