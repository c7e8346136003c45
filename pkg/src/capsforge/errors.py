"""Exception hierarchy shared across the pipeline stages."""

from __future__ import annotations


class CapsforgeError(Exception):
    """Base class for all errors raised by this package."""


class MalformedLine(CapsforgeError):
    """A shard line could not be parsed into a valid record."""

    def __init__(self, path: str, line_no: int, byte_offset: int, reason: str):
        self.path = path
        self.line_no = line_no
        self.byte_offset = byte_offset
        self.reason = reason
        super().__init__(f"{path}:{line_no} (byte {byte_offset}): {reason}")


class DuplicateId(CapsforgeError):
    """The same record id was written twice into one shard."""

    def __init__(self, record_id: str):
        self.record_id = record_id
        super().__init__(f"duplicate record id: {record_id!r}")


class EmptyCaption(CapsforgeError):
    """A caption that must be non-empty was empty after trimming."""


class BackendError(CapsforgeError):
    """A chat-completion call failed after exhausting its retries.

    ``status`` is an HTTP status code, or one of the symbolic strings
    ``"timeout"``, ``"connection"``, ``"bad_response"``, ``"empty_response"``.
    """

    def __init__(self, status, detail: str = ""):
        self.status = status
        self.detail = detail
        super().__init__(f"backend failure ({status}){': ' + detail if detail else ''}")


class ModeMismatch(CapsforgeError):
    """Two statistics accumulators with incompatible modes were merged."""


class EmptyCorpus(CapsforgeError):
    """A reference corpus with zero images was supplied to the scorer."""


class MissingReferences(CapsforgeError):
    """A candidate id has no reference captions."""

    def __init__(self, image_id: str):
        self.image_id = image_id
        super().__init__(f"no references for image id {image_id!r}")


class InvalidTriplet(CapsforgeError):
    """A caption triplet violated its field invariants."""


class ConfigError(CapsforgeError):
    """A configuration file or flag combination was invalid."""


class CoverageGap(CapsforgeError):
    """One evaluated system lacks an output for a sampled id."""

    def __init__(self, record_id: str, system: str):
        self.record_id = record_id
        self.system = system
        super().__init__(f"system {system!r} has no output for id {record_id!r}")


class UnknownSession(CapsforgeError):
    """The requested evaluation session does not exist."""


class UnknownItem(CapsforgeError):
    """The judged item id does not exist in the session."""


class DuplicateJudgment(CapsforgeError):
    """The (item, annotator) pair was already judged."""
