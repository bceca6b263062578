"""Exception hierarchy shared by all namesound modules.

Two branches matter for the CLI: ``DataError`` maps to exit code 2 and
``BackendError`` to exit code 3. Usage errors are handled by argparse
itself (exit code 1).
"""


class NamesoundError(Exception):
    """Base class for every error raised by this package."""


class DataError(NamesoundError):
    """Invalid, malformed, or out-of-contract input data."""


class BackendError(NamesoundError):
    """Failure in an external audio/TTS backend."""


# --- corpus -----------------------------------------------------------------

class EmptyNameError(DataError):
    """A name is empty after trimming."""


class NameTooShortError(DataError):
    """A name is shorter than the configured minimum length."""


class EmptyCorpusError(DataError):
    """A corpus file yielded zero valid names."""


class MalformedRowError(DataError):
    """A ground-truth CSV row cannot be parsed."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


# --- phonetics --------------------------------------------------------------

class NoEncodableContentError(DataError):
    """Input contains no A-Z letter, so no phonetic code exists."""


# --- speech -----------------------------------------------------------------

class BackendUnavailableError(BackendError):
    """No TTS backend is configured or the configured one cannot run."""


class SynthesisFailedError(BackendError):
    """The backend could not produce usable audio for a name."""


class DecodeError(BackendError):
    """Audio bytes are not a decodable RIFF/WAVE payload."""


# --- embed ------------------------------------------------------------------

class InvalidRangeError(DataError):
    """Frequency range or bank size parameters are inconsistent."""


class EmptyClipError(DataError):
    """An audio clip holds no samples."""


class ClipTooShortError(DataError):
    """An audio clip is shorter than one analysis frame."""


class EmbeddingStoreError(DataError):
    """An embedding TSV file is malformed."""


# --- engine -----------------------------------------------------------------

class DimensionMismatchError(DataError):
    """Vectors of different dimensionality were mixed."""


class DuplicateNameError(DataError):
    """The same name appears twice in an index build."""


class EmptyIndexError(DataError):
    """An index build received no embeddings."""


# --- metrics ----------------------------------------------------------------

class MissingTruthError(DataError):
    """A run contains a query with no ground-truth entry."""


class EmptyTruthError(DataError):
    """A truth set for a query is empty."""


class TooFewEmbeddingsError(DataError):
    """Not enough embeddings for the requested projection."""
