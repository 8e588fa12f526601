"""Utilities shared by the modules of the package."""

from hashlib import sha256
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping, Tuple, Union


Document = Mapping[str, Any]
DocumentSource = Union[str, Path, Document]

SIGNIFICANT_DIGITS = 6


class ModelError(ValueError):
    """Base class for every domain error raised by bayes_coherence."""


class DocumentError(ModelError):
    """A JSON document could not be read or is malformed."""


class AdvisoryWarning(UserWarning):
    """Base class for advisories a run report carries as warnings."""


class DuplicateKeyError(DocumentError):
    """A JSON object in a document repeats one of its keys."""
    def __init__(self, key: str) -> None:
        super().__init__("duplicate key in document: {!r}".format(key))
        self.key = key


def load_document(source: DocumentSource) -> Dict[str, Any]:
    """
    Returns the JSON object described by `source`, which may be a path, a
    string of JSON text (anything starting with '{') or an already-parsed
    mapping. Repeated keys within any object are rejected.
    """
    if isinstance(source, Mapping):
        return dict(source)

    if isinstance(source, str) and source.lstrip().startswith('{'):
        text = source
    else:
        try:
            with Path(source).open() as f:
                text = f.read()
        except OSError as e:
            raise DocumentError("cannot read {}: {}"
                                .format(source, e.strerror)) from e

    try:
        document = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as e:
        raise DocumentError("invalid JSON: {}".format(e)) from e

    if not isinstance(document, dict):
        raise DocumentError('document must be a JSON object')

    return document


def _reject_duplicates(pairs: List[Tuple[str, Any]]) -> Dict[str, Any]:
    document = {}  # type: Dict[str, Any]

    for key, value in pairs:
        if key in document:
            raise DuplicateKeyError(key)
        document[key] = value

    return document


def file_digest(path: Union[str, Path]) -> str:
    """Returns the first 12 hex digits of the SHA-256 of a file."""
    with Path(path).open('rb') as f:
        return sha256(f.read()).hexdigest()[:12]


def parse_bitstring(bits: str, width: int) -> int:
    """
    Converts an assignment bitstring into a bitmask. The leftmost character
    is variable 1 (bit 0) and '1' means true, so '10' is mask 0b01.
    """
    if len(bits) != width or any(c not in '01' for c in bits):
        raise DocumentError("expected a bitstring of {} characters, got {!r}"
                            .format(width, bits))

    return sum(1 << i for i, c in enumerate(bits) if c == '1')


def to_bitstring(mask: int, width: int) -> str:
    """The inverse of `parse_bitstring`."""
    return ''.join('1' if mask >> i & 1 else '0' for i in range(width))


def format_probability(value: float) -> str:
    """Formats a probability (or any real) to 6 significant digits."""
    return "{:.{}g}".format(value, SIGNIFICANT_DIGITS)


def round_probability(value: float) -> float:
    """Rounds a real to the digits that `format_probability` prints."""
    return float(format_probability(value))


def is_int(value: Any) -> bool:
    """A JSON integer; true and false do not count."""
    return isinstance(value, int) and not isinstance(value, bool)


def is_number(value: Any) -> bool:
    """A JSON number; true and false do not count."""
    return isinstance(value, (int, float)) and not isinstance(value, bool)
