"""The report every command prints."""

import json
from typing import Any, Dict, NamedTuple, Optional, Sequence, Tuple, Union

from bayes_coherence.utils import format_probability, round_probability


Value = Union[str, bool, int, float, Sequence[float]]

FORMATS = ('text', 'json')


class InputDigest(NamedTuple('InputDigest', [('path', str),
                                             ('digest', str)])):
    """An input file and the leading hex digits of its SHA-256."""


class Entry(NamedTuple('Entry', [('label', str), ('value', Value)])):
    """One labelled measure or verdict."""


class RunReport(NamedTuple('RunReport',
                           [('command', str),
                            ('inputs', Tuple[InputDigest, ...]),
                            ('measures', Tuple[Entry, ...]),
                            ('verdicts', Tuple[Entry, ...]),
                            ('warnings', Tuple[str, ...])])):
    """
    Everything a command computed. Rendering is deterministic: reals are
    printed to 6 significant digits and a timestamp only appears when one is
    passed in as `generated`.
    """
    @classmethod
    def create(cls, command: str, inputs: Sequence[InputDigest] = (),
               measures: Sequence[Tuple[str, Value]] = (),
               verdicts: Sequence[Tuple[str, Value]] = (), *,
               warnings: Sequence[str] = ()) -> 'RunReport':
        """Builds a report from plain (label, value) pairs."""
        return cls(command, tuple(inputs),
                   tuple(Entry(*m) for m in measures),
                   tuple(Entry(*v) for v in verdicts),
                   tuple(warnings))

    def with_warnings(self, warnings: Sequence[str]) -> 'RunReport':
        """The report with `warnings` appended."""
        return self._replace(warnings=self.warnings + tuple(warnings))

    def measure(self, label: str) -> Value:
        """Looks up a measure or verdict by label."""
        for entry in self.measures + self.verdicts:
            if entry.label == label:
                return entry.value
        raise KeyError(label)

    def render(self, output_format: str = 'text',
               generated: Optional[str] = None) -> str:
        """Renders the report as text lines or as a JSON object."""
        if output_format == 'json':
            return self.to_json(generated)
        return self.to_text(generated)

    def to_text(self, generated: Optional[str] = None) -> str:
        """One 'label: value' line per item."""
        lines = ["command: {}".format(self.command)]
        if generated is not None:
            lines.append("generated: {}".format(generated))

        lines.extend("input: {} sha256:{}".format(i.path, i.digest)
                     for i in self.inputs)
        lines.extend("{}: {}".format(e.label, _text(e.value))
                     for e in self.measures)
        lines.extend("verdict: {}: {}".format(e.label, _text(e.value))
                     for e in self.verdicts)
        lines.extend("warning: {}".format(w) for w in self.warnings)

        return '\n'.join(lines) + '\n'

    def to_json(self, generated: Optional[str] = None) -> str:
        """A JSON object with reals rounded to 6 significant digits."""
        document = {'command': self.command}  # type: Dict[str, Any]
        if generated is not None:
            document['generated'] = generated

        document['inputs'] = [{'path': i.path, 'sha256': i.digest}
                              for i in self.inputs]
        document['measures'] = {e.label: _json(e.value)
                                for e in self.measures}
        document['verdicts'] = {e.label: _json(e.value)
                                for e in self.verdicts}
        document['warnings'] = list(self.warnings)

        return json.dumps(document, indent=2) + '\n'


def _text(value: Value) -> str:
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, (int, str)):
        return str(value)
    if isinstance(value, float):
        return format_probability(value)
    return ' '.join(format_probability(v) for v in value)


def _json(value: Value) -> Any:
    if isinstance(value, (bool, int, str)):
        return value
    if isinstance(value, float):
        return round_probability(value)
    return [round_probability(v) for v in value]
