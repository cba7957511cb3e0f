"""Exception hierarchy shared by all taxograft modules."""


class TaxograftError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(TaxograftError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class CycleError(TaxograftError):
    def __init__(self, synset_id):
        super().__init__(f"hypernym cycle through synset {synset_id!r}")
        self.synset_id = synset_id


class DanglingEdgeError(TaxograftError):
    def __init__(self, synset_id, missing_id):
        super().__init__(
            f"synset {synset_id!r} lists unknown hypernym {missing_id!r}")
        self.synset_id = synset_id
        self.missing_id = missing_id


class UnknownSynsetError(TaxograftError):
    def __init__(self, synset_id):
        super().__init__(f"unknown synset {synset_id!r}")
        self.synset_id = synset_id


class PosMismatchError(TaxograftError):
    pass


class EmptyDatasetError(TaxograftError):
    pass


class DimensionMismatchError(TaxograftError):
    pass


class ZeroQueryError(TaxograftError):
    pass


class OutOfBallError(TaxograftError):
    pass


class ConfigError(TaxograftError):
    pass


class SingularSolveError(TaxograftError):
    pass


class NonFiniteLossError(TaxograftError):
    pass


class MissError(TaxograftError):
    pass


class RankError(TaxograftError):
    pass


class InsufficientDataError(TaxograftError):
    pass


class DegenerateDataError(TaxograftError):
    pass


class SchemaMismatchError(TaxograftError):
    pass


class DuplicatePredictionError(TaxograftError):
    pass


class EmptyGoldError(TaxograftError):
    pass
