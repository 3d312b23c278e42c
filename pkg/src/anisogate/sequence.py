"""Pulse sequences and the pulse-program interchange format.

A pulse program serializes as a JSON object::

    {"pulses": [{"pair": "2-3", "lambda": ..., "alpha": ..., "beta": ...,
                 "gamma": ...}, ...],
     "meta": {"procedure": ..., "n": ..., "Lambda": ..., "Phi": ...,
              "psi": ..., "pulseCount": ...}}

Pulses are listed in execution order (first applied first).  Pair labels
are "i-j" with j = i + 1 and spins numbered from 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ProgramFormatError
from .kernel import GateParams, pseudospin_form
from .rotation import Rotation, compose

__all__ = ["Pulse", "PulseSequence", "pulse_rotation", "pair_label",
           "parse_pair_label", "program_record", "parse_program_record"]


@dataclass(frozen=True)
class Pulse:
    """One exchange pulse on the neighboring spin pair (pair, pair+1)."""

    pair: int
    params: GateParams

    def __post_init__(self) -> None:
        if int(self.pair) != self.pair or self.pair < 1:
            raise ValueError("pair must be a positive spin index")
        object.__setattr__(self, "pair", int(self.pair))


def pulse_rotation(params: GateParams) -> Rotation:
    """Pseudospin rotation of a single pulse, carrying its lambda."""
    form = pseudospin_form(params)
    return Rotation.from_axis_angle(form.axis, form.angle,
                                    accumulated_lambda=params.lam)


@dataclass(frozen=True)
class PulseSequence:
    """Ordered pulses on named spin pairs with exact phase bookkeeping."""

    pulses: tuple[Pulse, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pulses", tuple(self.pulses))

    def __len__(self) -> int:
        return len(self.pulses)

    def __iter__(self):
        return iter(self.pulses)

    @property
    def lambda_total(self) -> float:
        """Exact (correctly rounded) sum of pulse strengths."""
        return math.fsum(p.params.lam for p in self.pulses)

    @property
    def pairs(self) -> set[int]:
        return {p.pair for p in self.pulses}

    def phi_net(self) -> Rotation:
        """Net pseudospin rotation; defined for single-pair sequences only."""
        if len(self.pairs) > 1:
            raise ValueError("phi_net is defined for single-pair sequences")
        out = Rotation.identity()
        for p in self.pulses:
            out = compose(out, pulse_rotation(p.params))
        return out

    def extend(self, other: "PulseSequence") -> "PulseSequence":
        return PulseSequence(self.pulses + other.pulses)


def pair_label(pair: int) -> str:
    return f"{pair}-{pair + 1}"


def parse_pair_label(label: str) -> int:
    try:
        lo, hi = (int(part) for part in label.split("-"))
    except (ValueError, AttributeError) as exc:
        raise ProgramFormatError(f"bad pair label {label!r}") from exc
    if hi != lo + 1 or lo < 1:
        raise ProgramFormatError(f"pair label {label!r} is not a neighboring pair")
    return lo


def program_record(seq: PulseSequence, meta: dict | None = None) -> dict:
    """Serialize a sequence (plus optional metadata) to the interchange format."""
    rec = {"pulses": [{"pair": pair_label(p.pair), **p.params.to_record()}
                      for p in seq.pulses]}
    m = dict(meta or {})
    m.setdefault("pulseCount", len(seq))
    m.setdefault("Lambda", seq.lambda_total)
    rec["meta"] = m
    return rec


def parse_program_record(rec: dict) -> tuple[PulseSequence, dict]:
    """Parse the interchange format back into a sequence and its metadata."""
    if not isinstance(rec, dict) or "pulses" not in rec:
        raise ProgramFormatError("program record must be an object with a 'pulses' list")
    pulses = []
    for entry in rec["pulses"]:
        try:
            pair = parse_pair_label(entry["pair"])
            params = GateParams.from_record(entry)
        except (KeyError, TypeError, ValueError) as exc:
            raise ProgramFormatError(f"bad pulse entry {entry!r}") from exc
        pulses.append(Pulse(pair=pair, params=params))
    return PulseSequence(tuple(pulses)), dict(rec.get("meta", {}))
