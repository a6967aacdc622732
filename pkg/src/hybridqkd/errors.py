"""Exception types shared across the package."""


class DomainError(ValueError):
    """An input lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A run configuration is malformed or inconsistent.

    Carries the line number of the offending entry when it came from a
    profile file.
    """

    def __init__(self, message: str, lineno: int | None = None, origin: str | None = None):
        self.lineno = lineno
        self.origin = origin
        where = ""
        if origin is not None and lineno is not None:
            where = f"{origin}:{lineno}: "
        elif lineno is not None:
            where = f"line {lineno}: "
        elif origin is not None:
            where = f"{origin}: "
        super().__init__(where + message)
