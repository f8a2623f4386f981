"""Attacker-side transcript analysis.

Anyone who observed the screen colorings and the buttons pressed can
run the same elimination the interface ran.  Per phase that yields the
digits still consistent with the clicks, each with the button colors it
implies.  Because the user keeps one button convention for the whole
PIN, candidates across phases must share a compatible mapping; that
cross-phase constraint is what collapses short phases to a unique PIN.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .engine import (
    ButtonMapping,
    ClickEvent,
    apply_click,
    implied_mapping,
    new_belief,
    seed_evidence,
    try_merge_mappings,
)
from .errors import InvalidConfigError
from .session import CLASSIC_MAPPING, Mode, Transcript

MAX_PIN_CANDIDATES = 10_000


def crack_phase(
    clicks: list[ClickEvent] | tuple[ClickEvent, ...],
    n_buttons: int,
    seed_mapping: ButtonMapping | None = None,
) -> dict[int, ButtonMapping]:
    """Digits consistent with one phase's clicks, with their implied mappings."""
    if not clicks:
        raise InvalidConfigError("cannot analyze an empty click sequence")
    belief = new_belief(n_buttons)
    if seed_mapping is not None:
        belief = seed_evidence(belief, seed_mapping)
    for click in clicks:
        belief = apply_click(belief, click)
    return {
        hyp.digit: implied_mapping(belief, hyp.digit)
        for hyp in belief.hypotheses
        if hyp.consistent
    }


@dataclass(frozen=True)
class PinCandidate:
    digits: tuple[int, ...]
    mapping: ButtonMapping

    @property
    def pin(self) -> str:
        return "".join(str(d) for d in self.digits)


@dataclass(frozen=True)
class CrackReport:
    phase_candidates: tuple[tuple[int, ...], ...]
    pin_candidates: tuple[PinCandidate, ...]
    unique: bool
    truncated: bool

    @property
    def pins(self) -> tuple[str, ...]:
        return tuple(c.pin for c in self.pin_candidates)

    def to_json_obj(self) -> dict[str, Any]:
        obj: dict[str, Any] = {
            "phases": [
                {"digits": list(digits), "count": len(digits)}
                for digits in self.phase_candidates
            ],
            "pin_candidates": [] if self.truncated else list(self.pins),
            "unique": self.unique,
        }
        if self.truncated:
            obj["truncated"] = True
        if self.unique:
            winner = self.pin_candidates[0]
            obj["mapping"] = [
                c.symbol if c is not None else None for c in winner.mapping.colors
            ]
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"


def crack_transcript(transcript: Transcript) -> CrackReport:
    """Recover PIN candidates from an observed transcript.

    Phases with no clicks (an untouched open phase at the end of an
    export) constrain nothing and are skipped.  Candidate tuples are
    enumerated in phase order, digit-ascending, and capped at
    ``MAX_PIN_CANDIDATES``; past the cap only the per-phase sets are
    reported.
    """
    seed_mapping = CLASSIC_MAPPING if transcript.mode is Mode.CLASSIC else None
    per_phase: list[dict[int, ButtonMapping]] = [
        crack_phase(phase.clicks, transcript.n_buttons, seed_mapping)
        for phase in transcript.phases
        if phase.clicks
    ]
    phase_candidates = tuple(tuple(sorted(c)) for c in per_phase)

    candidates: list[PinCandidate] = []
    truncated = False

    def extend(
        index: int, digits: tuple[int, ...], mapping: ButtonMapping
    ) -> bool:
        nonlocal truncated
        if index == len(per_phase):
            if len(candidates) >= MAX_PIN_CANDIDATES:
                truncated = True
                return False
            candidates.append(PinCandidate(digits, mapping))
            return True
        for digit in sorted(per_phase[index]):
            merged = try_merge_mappings(mapping, per_phase[index][digit])
            if merged is None:
                continue
            if not extend(index + 1, digits + (digit,), merged):
                return False
        return True

    if per_phase:
        extend(0, (), ButtonMapping.empty(transcript.n_buttons))

    return CrackReport(
        phase_candidates=phase_candidates,
        pin_candidates=tuple(candidates) if not truncated else tuple(),
        unique=not truncated and len(candidates) == 1,
        truncated=truncated,
    )
