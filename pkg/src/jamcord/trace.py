"""Force-displacement traces and their on-disk CSV form.

The CSV schema is fixed so traces diff cleanly and round-trip exactly:
header ``displacement_mm,force_N,phase``, one row per sample in ascending
displacement within each phase block, numbers at 6 significant digits,
LF line endings.  Phases are ``press``, ``jam`` and ``lift``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple

from .errors import InputError, SchemaError

PHASES = ("press", "jam", "lift")
CSV_HEADER = "displacement_mm,force_N,phase"


class TraceSample(NamedTuple):
    displacement_mm: float
    force_N: float
    phase: str


def _fmt(x: float) -> str:
    return f"{x:.6g}"


@dataclass(frozen=True)
class GraspTrace:
    """Ordered (displacement, force) samples with phase markers."""

    samples: tuple[TraceSample, ...]
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(
            self, "samples",
            tuple(TraceSample(float(d), float(f), str(p))
                  for d, f, p in self.samples))
        for s in self.samples:
            if s.phase not in PHASES:
                raise InputError(f"unknown phase {s.phase!r}")
            if not math.isfinite(s.force_N) or not math.isfinite(s.displacement_mm):
                raise InputError(f"non-finite trace sample {s}")

    def validate(self) -> None:
        """Check strict displacement increase within each phase block."""
        prev = None
        for s in self.samples:
            if prev is not None and s.phase == prev.phase:
                if not s.displacement_mm > prev.displacement_mm:
                    raise InputError(
                        f"displacements must strictly increase within phase "
                        f"{s.phase!r}: {prev.displacement_mm} -> "
                        f"{s.displacement_mm}")
            prev = s

    def phase_samples(self, phase: str) -> list[TraceSample]:
        return [s for s in self.samples if s.phase == phase]

    def displacements(self, phase: str | None = None) -> list[float]:
        return [s.displacement_mm for s in self.samples
                if phase is None or s.phase == phase]

    def forces(self, phase: str | None = None) -> list[float]:
        return [s.force_N for s in self.samples
                if phase is None or s.phase == phase]

    def to_csv_text(self) -> str:
        lines = [CSV_HEADER]
        lines.extend(
            f"{_fmt(s.displacement_mm)},{_fmt(s.force_N)},{s.phase}"
            for s in self.samples)
        return "\n".join(lines) + "\n"

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(self.to_csv_text())


def trace_from_samples(samples: Iterable[tuple], metadata: dict | None = None) -> GraspTrace:
    return GraspTrace(samples=tuple(samples), metadata=dict(metadata or {}))


def read_trace_csv(path) -> GraspTrace:
    """Parse a trace CSV, enforcing the schema exactly."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise SchemaError(f"cannot read trace {path}: {exc}") from exc
    return parse_trace_csv(text, name=str(path))


def parse_trace_csv(text: str, name: str = "<string>") -> GraspTrace:
    lines = text.split("\n")
    if not lines or lines[0] != CSV_HEADER:
        raise SchemaError(
            f"{name}: expected header {CSV_HEADER!r}, got "
            f"{lines[0][:60]!r}" if lines else f"{name}: empty file")
    if lines[-1] == "":
        lines = lines[:-1]
    samples = []
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != 3:
            raise SchemaError(f"{name}:{i}: expected 3 fields, got {len(parts)}")
        d_s, f_s, phase = parts
        if phase not in PHASES:
            raise SchemaError(f"{name}:{i}: unknown phase {phase!r}")
        try:
            d, f = float(d_s), float(f_s)
        except ValueError as exc:
            raise SchemaError(f"{name}:{i}: bad number: {exc}") from exc
        samples.append(TraceSample(d, f, phase))
    trace = GraspTrace(samples=tuple(samples), metadata={"source": name})
    return trace
