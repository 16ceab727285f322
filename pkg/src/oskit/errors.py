"""Error type shared by all oskit modules."""


class OskitError(ValueError):
    """A domain error carrying a stable machine-readable code.

    The code strings (``NOT_PSD``, ``DOMAIN_VIOLATION``, ...) are part of the
    public contract and appear verbatim in CLI reports.
    """

    def __init__(self, code, message=""):
        self.code = code
        self.message = message
        super().__init__(f"{code}: {message}" if message else code)
