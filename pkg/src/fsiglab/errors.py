"""Exception types shared across the package."""


class FsigError(Exception):
    """Base class for domain errors."""


class ParseError(FsigError):
    """Bad polynomial or ring-spec text; carries a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class ExponentOverflowError(FsigError):
    """An exponent exceeded the 32-bit cap; never wraps silently."""


class ResourceLimitError(FsigError):
    """A configured pair/term/size budget was exhausted."""


class NotMPrimaryError(FsigError):
    """An operation required a finite-colength ideal and got an infinite one."""
