"""Exception hierarchy shared by every gridguard module."""


class GridGuardError(Exception):
    """Base class for all library errors."""


class GridError(GridGuardError, ValueError):
    pass


class GridFormatError(GridError):
    """A serialized grid could not be parsed."""


class BadMagicError(GridFormatError):
    pass


class TruncatedError(GridFormatError):
    pass


class RegionError(GridGuardError, ValueError):
    pass


class DescriptorError(GridGuardError, ValueError):
    pass


class MissingKeyError(GridGuardError):
    pass


class StoreFormatError(GridGuardError, ValueError):
    pass


class VariantMismatchError(StoreFormatError):
    pass


class StoreMismatchError(GridGuardError, ValueError):
    """A store was built for a grid of different dimensions."""


class NonConformingSizeError(GridGuardError, ValueError):
    pass


class StoreIntegrityError(GridGuardError):
    """The digests contradict each other; the store itself is suspect."""


class CleanLineError(GridGuardError):
    """A 1-D search was started on a line with no corrupted cell."""


class ConvexityViolationError(GridGuardError):
    """The corrupted region breaks the row/column contiguity assumption."""


class NotCorruptedError(GridGuardError, ValueError):
    pass
