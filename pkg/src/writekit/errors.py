"""Exception types shared across the toolkit."""


class WritekitError(Exception):
    """Base class for all toolkit errors."""


class FormatError(WritekitError, ValueError):
    """A file or record does not match its declared format.

    Carries the 1-based line number when the source is a line-oriented file.
    """

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        prefix = ""
        if path is not None:
            prefix += f"{path}: "
        if line is not None:
            prefix += f"line {line}: "
        super().__init__(prefix + message)


class DataError(WritekitError, ValueError):
    """Input data violates a precondition (empty corpus, bad range, ...)."""


class NotFittedError(WritekitError, ValueError):
    """A model method was called before fit() / load()."""


class ConfigError(WritekitError, ValueError):
    """A config document is missing required keys or has bad values."""


class TranslationError(WritekitError):
    """A translation backend failed."""


class TranslationTimeout(TranslationError):
    """Remote backend exceeded its timeout. Carries elapsed seconds."""

    def __init__(self, message, elapsed):
        self.elapsed = elapsed
        super().__init__(message)


class TranslationHTTPError(TranslationError):
    """Remote backend returned a non-2xx status."""

    def __init__(self, message, status):
        self.status = status
        super().__init__(message)
