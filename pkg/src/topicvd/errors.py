"""Exception hierarchy shared across the toolkit."""


class TopicVDError(Exception):
    """Base class for all toolkit errors."""


class SrtParseError(TopicVDError):
    """Malformed SRT input (strict mode); carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class VectorFileError(TopicVDError):
    """Malformed or inconsistent embedding vector file."""


class ScoringError(TopicVDError):
    """Invalid scoring input (dimension mismatch, zero vector, unscored pair)."""


class ManifestError(TopicVDError):
    """Clip/corpus manifest constraint violation."""


class CorpusError(TopicVDError):
    """Split or scenario construction failure."""


class ContextError(TopicVDError):
    """Context retrieval failure (unknown anchor, missing vectors)."""


class FusionError(TopicVDError):
    """Invalid fusion-kernel input (shape mismatch, non-finite values, unknown g)."""


class MetricError(TopicVDError):
    """Invalid evaluation-metric input."""


class ConfigError(TopicVDError):
    """Invalid pipeline configuration."""


class StageError(TopicVDError):
    """Pipeline stage failure; carries the stage name."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")
