"""Exception types shared across the package."""


class CorruptvecError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(CorruptvecError, ValueError):
    """A hyperparameter or argument is outside its legal range."""


class CorpusError(CorruptvecError):
    """The corpus is unusable (empty, unreadable, or no surviving vocabulary)."""


class VocabError(CorruptvecError, KeyError):
    """A word is missing from the vocabulary."""


class VectorFileError(CorruptvecError):
    """A word-vector file failed to parse.

    Carries the 1-based line number of the offending line when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonFiniteComputation(CorruptvecError):
    """A loss or gradient came out NaN/inf; carries the offending instance."""

    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance


class TrainingDiverged(CorruptvecError):
    """Training produced a non-finite loss or parameter entry."""

    def __init__(self, message, doc_index=None, epoch=None):
        super().__init__(message)
        self.doc_index = doc_index
        self.epoch = epoch
