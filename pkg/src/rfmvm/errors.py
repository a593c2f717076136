"""Exception and warning types shared across the library."""


class SyncError(RuntimeError):
    """No preamble window exceeded the detection threshold."""


class UnderDeterminedError(ValueError):
    """Probe set is rank-deficient; the channel estimate is not identifiable."""


class SingularChannelWarning(UserWarning):
    """A channel entry fell below the division floor and was clamped."""


class ContainerError(ValueError):
    """Base class for binary container format violations."""


class BadMagicError(ContainerError):
    """File does not start with the expected magic bytes."""


class TruncatedFileError(ContainerError):
    """File ends before the declared payload is complete."""


class SizeMismatchError(ContainerError):
    """Declared sizes are inconsistent with the payload length."""
