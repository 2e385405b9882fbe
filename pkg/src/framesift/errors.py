"""Exception types shared across the engine."""


class FramesiftError(Exception):
    """Base class for all engine errors."""


class IngestError(FramesiftError):
    """Invalid or inconsistent input data during catalog/file ingest."""


class FormatError(FramesiftError):
    """Corrupt or malformed on-disk file (bad magic, truncation, ...)."""


class NotFoundError(FramesiftError):
    """Unknown frame, clip, video, or space identifier."""


class EmbedderError(FramesiftError):
    """A query-embedding backend failed or returned a bad vector."""
