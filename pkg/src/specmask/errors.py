"""Package-wide error type carrying a stable machine-readable code."""


class SpecmaskError(Exception):
    """Raised by every operation in this package on contract violation.

    ``code`` is a stable snake_case identifier (e.g. ``clip_too_short``,
    ``asymmetric_mask``) suitable for machine parsing; the message is
    free-form detail for humans.
    """

    def __init__(self, code: str, message: str = ""):
        self.code = code
        super().__init__(f"{code}: {message}" if message else code)
