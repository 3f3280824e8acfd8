"""Exception hierarchy.

Two branches matter for exit codes and HTTP status mapping: ConfigError covers
environment and configuration problems (CLI exit 1, HTTP 400), DomainError
covers problems with the data itself (CLI exit 2, HTTP 422).
"""


class ScratchCcsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ScratchCcsError):
    """Bad configuration or environment: unreadable paths, malformed config values."""


class DomainError(ScratchCcsError):
    """The input data violates a contract of the operation it was given to."""


# --- ingestion ---

class MissingProjectJson(DomainError):
    """An sb3 archive has no project.json member."""


class CorruptArchive(DomainError):
    """An sb3 file is not a readable zip archive."""


class InvalidUtf8(DomainError):
    """project.json bytes do not decode as UTF-8."""


class EmptyStudio(DomainError):
    """No projects found where a studio was expected; usually a misconfigured path."""


class StudioNotFound(DomainError):
    """The remote studio id does not exist."""


# --- project parsing ---

class UnsupportedFormat(DomainError):
    """The document is not a Scratch 3 project (e.g. a Scratch 2 export)."""


class SchemaError(DomainError):
    """Structurally malformed project document; message carries the JSON path."""


class DuplicateProjectId(DomainError):
    """Two projects in one studio share a project id."""


# --- scoring ---

class UnknownElement(DomainError):
    """An element was looked up in a studio index that does not contain it."""


# --- clustering and embeddings ---

class BadK(DomainError):
    """Requested cluster count is outside [1, number of items]."""


class DecodeError(DomainError):
    """Image bytes could not be decoded to an RGB raster."""


class MissingEmbedding(DomainError):
    """An imported embedding file has no row for a required image."""


class DimensionMismatch(DomainError):
    """Imported embedding rows disagree on vector length."""


class NonFiniteValue(DomainError):
    """An embedding contains NaN or infinite components."""


class EmptyCorpus(DomainError):
    """TF-IDF was asked to vectorize documents that are all empty."""


# --- analysis ---

class DegenerateInput(DomainError):
    """Kendall's tau is undefined: one of the inputs is constant."""


class InsufficientOverlap(DomainError):
    """Fewer than two projects are scored by both metrics being compared."""
