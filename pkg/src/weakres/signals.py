"""Discrete-time multivariate signals and their CSV form.

A signal is a finite sequence of samples over a fixed set of named real
variables, one sample per time step.  Time is the sample index; the physical
duration of a step is carried only as metadata and never enters semantics.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import ParseError, UnknownVariableError


@dataclass(frozen=True)
class Signal:
    """An immutable trace: ``variables`` names the columns of ``samples``."""

    variables: tuple[str, ...]
    samples: tuple[tuple[float, ...], ...]
    step_duration: float = 1.0
    _index: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names in signal")
        if self.step_duration <= 0:
            raise ValueError("step_duration must be positive")
        for row in self.samples:
            if len(row) != len(self.variables):
                raise ValueError(
                    f"sample width {len(row)} does not match {len(self.variables)} variables"
                )
        self._index.update({name: i for i, name in enumerate(self.variables)})

    def __len__(self) -> int:
        return len(self.samples)

    def column(self, name: str) -> tuple[float, ...]:
        try:
            i = self._index[name]
        except KeyError:
            raise UnknownVariableError(f"signal has no variable {name!r}") from None
        return tuple(row[i] for row in self.samples)

    def value(self, name: str, t: int) -> float:
        try:
            i = self._index[name]
        except KeyError:
            raise UnknownVariableError(f"signal has no variable {name!r}") from None
        return self.samples[t][i]

    def has_variable(self, name: str) -> bool:
        return name in self._index

    def suffix(self, t: int) -> "Signal":
        """The signal restricted to steps ``t..end``."""
        return Signal(self.variables, self.samples[t:], self.step_duration)

    def extended(self, other: "Signal") -> "Signal":
        """Concatenate ``other``'s samples after this signal (same variables)."""
        if other.variables != self.variables:
            raise ValueError("cannot concatenate signals with different variables")
        return Signal(self.variables, self.samples + other.samples, self.step_duration)

    @staticmethod
    def from_rows(variables: Sequence[str], rows: Iterable[Mapping[str, float]],
                  step_duration: float = 1.0) -> "Signal":
        names = tuple(variables)
        samples = tuple(tuple(float(r[n]) for n in names) for r in rows)
        return Signal(names, samples, step_duration)

    @staticmethod
    def from_csv(text: str, step_duration: float = 1.0) -> "Signal":
        """Parse a signal from CSV text: header row of names, one row per step."""
        reader = csv.reader(io.StringIO(text))
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError("empty signal CSV") from None
        names = tuple(h.strip() for h in header)
        if any(not n for n in names):
            raise ParseError("blank column name in signal CSV header")
        samples = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(names):
                raise ParseError(f"row has {len(row)} values, expected {len(names)}", lineno, 1)
            try:
                samples.append(tuple(float(v) for v in row))
            except ValueError as exc:
                raise ParseError(f"bad numeric value: {exc}", lineno, 1) from None
        return Signal(names, tuple(samples), step_duration)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(self.variables)
        for row in self.samples:
            writer.writerow([format_float(v) for v in row])
        return out.getvalue()


def format_float(v: float) -> str:
    """Stable, compact float formatting used in all CSV output."""
    if v == int(v) and abs(v) < 1e15:
        return str(int(v))
    return repr(v)
