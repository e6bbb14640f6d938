"""Exception types shared across the package."""


class SpiderveilError(Exception):
    """Base class for domain errors raised by this package."""


class RetrievalError(SpiderveilError):
    """A data source failed to answer a request.

    Carries the tag that was being expanded (when raised during corpus
    bootstrapping) and the number of attempts made (when raised by a
    transport-backed source).
    """

    def __init__(self, message: str, *, tag: str | None = None, retries: int = 0):
        super().__init__(message)
        self.tag = tag
        self.retries = retries


class NotFoundError(SpiderveilError):
    """A blogger or post id is unknown to the data source."""


class ScoringError(SpiderveilError):
    """A blogger or text has nothing the language model can score."""


class SelfLoopError(SpiderveilError):
    """A graph edge from a node to itself was rejected."""


class GraphFormatError(SpiderveilError):
    """A serialized graph or fixture document is malformed."""
