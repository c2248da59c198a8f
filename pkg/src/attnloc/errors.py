"""Exception types shared across the package."""


class AttnlocError(Exception):
    """Base class for all package-specific errors."""


class ShapeError(AttnlocError, ValueError):
    """Operands have incompatible shapes; message reports both."""


class ParameterError(AttnlocError, ValueError):
    """A hyperparameter or argument is out of its valid range."""


class ContractError(AttnlocError, RuntimeError):
    """An internal invariant was violated (caller bug, not user input)."""


class SceneGenerationError(AttnlocError, RuntimeError):
    """Scene sampling or rasterization could not satisfy its constraints."""


class DatasetFormatError(AttnlocError, ValueError):
    """Dataset file is malformed. ``offset`` is the failing byte position."""

    def __init__(self, message, offset=None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class CheckpointFormatError(AttnlocError, ValueError):
    """Model checkpoint file is malformed or has an unsupported version."""


class TrainingDivergedError(AttnlocError, RuntimeError):
    """Loss became non-finite; the last good checkpoint is retained."""

    def __init__(self, message, last_checkpoint=None):
        super().__init__(message)
        self.last_checkpoint = last_checkpoint
