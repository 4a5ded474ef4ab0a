"""
Error hierarchy shared by every module

Validation failures also derive from ValueError so callers that only know
the standard exception keep working.
"""

from typing import Optional


class DomainError(Exception):
    """Base class for every error the pipeline raises on purpose"""


class FormatError(DomainError, ValueError):
    """A dataset row does not have the expected shape"""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ParseError(DomainError, ValueError):
    """A token could not be parsed as a number"""


class EmptyDataset(DomainError, ValueError):
    """A dataset file or container holds no instances"""


class IoError(DomainError):
    """Reading or writing a file failed"""


class ConfigError(DomainError, ValueError):
    """A configuration value violates a precondition"""


class ShapeError(DomainError, ValueError):
    """Array lengths disagree"""


class NumericalError(DomainError):
    """NaN or infinity appeared during optimisation"""

    def __init__(self, message: str, block: Optional[str] = None):
        self.block = block
        if block is not None:
            message = f"{message} (parameter block: {block})"
        super().__init__(message)


class EmptyBatch(DomainError, ValueError):
    """A loss was requested over zero instances"""


class MissingLabel(DomainError, ValueError):
    """Training needs a label on every instance"""


class AdapterError(DomainError):
    """The external classifier process failed"""

    def __init__(self, message: str, stderr: str = ''):
        self.stderr = stderr
        if stderr:
            message = f"{message}\n--- child stderr ---\n{stderr.rstrip()}"
        super().__init__(message)


class AdapterTimeout(AdapterError):
    """The external classifier did not answer in time"""


class ProtocolError(DomainError):
    """The external classifier answered with a malformed message"""


class DegenerateGroundTruth(DomainError, ValueError):
    """Ground truth is constant, so precision/recall are undefined"""


class VersionError(DomainError):
    """An artifact file is stale, of the wrong kind or of another version"""

    def __init__(self, message: str, path: Optional[str] = None):
        self.path = path
        if path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
