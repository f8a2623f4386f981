"""Multi-digit PIN entry on top of the belief engine.

A session walks through ``pin_length`` phases, one per digit.  Each
phase runs the engine until a single hypothesis survives, then commits
that digit and (optionally) carries the learned button colors into the
next phase as seeded evidence.  Sessions are immutable values: a click
produces a new session, so any intermediate state can be reproduced by
replaying the click sequence.

The coloring shown after the k-th click of the j-th phase is a pure
function of (seed, j, k), which is what makes exported transcripts
replayable bit-exactly.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace
from typing import Any

from .engine import (
    BeliefState,
    ButtonMapping,
    ClickEvent,
    Color,
    Coloring,
    DIGITS,
    N_DIGITS,
    apply_click,
    consistent_set,
    implied_mapping,
    inferred_digit,
    new_belief,
    seed_evidence,
)
from .errors import InvalidConfigError, InvalidStateError, TranscriptParseError
from .policies import PolicyKind, next_coloring
from .rng import SplitMix64, derive_seed

TRANSCRIPT_VERSION = 1
DEFAULT_CLICK_CAP = 200
MAX_SEED = (1 << 64) - 1

# Classic mode: two public buttons, left yellow, right grey.
CLASSIC_MAPPING = ButtonMapping((Color.YELLOW, Color.GREY))

ALL_DIGITS = frozenset(DIGITS)


class Mode(enum.Enum):
    CLASSIC = "classic"
    SELFCAL = "selfcal"

    @classmethod
    def from_name(cls, name: str) -> "Mode":
        for mode in cls:
            if mode.value == name:
                return mode
        raise InvalidConfigError(f"unknown mode {name!r}")


class SessionStatus(enum.Enum):
    IN_PROGRESS = "in_progress"
    ALL_INCONSISTENT = "all_inconsistent"
    CAPPED = "capped"
    COMPLETE = "complete"


@dataclass(frozen=True)
class SessionConfig:
    mode: Mode
    n_buttons: int = 9
    pin_length: int = 4
    policy: PolicyKind = PolicyKind.RANDOM_BALANCED
    seed: int = 0
    carryover: bool = True
    click_cap: int = DEFAULT_CLICK_CAP

    def __post_init__(self) -> None:
        if self.mode is Mode.CLASSIC and self.n_buttons != 2:
            raise InvalidConfigError("classic mode uses exactly 2 buttons")
        if self.n_buttons < 2:
            raise InvalidConfigError("need at least 2 buttons")
        if self.pin_length < 1:
            raise InvalidConfigError("pin_length must be at least 1")
        if self.click_cap < 1:
            raise InvalidConfigError("click_cap must be at least 1")
        if not 0 <= self.seed <= MAX_SEED:
            raise InvalidConfigError("seed must fit in 64 bits")


@dataclass(frozen=True)
class PhaseRecord:
    """A finished (committed or abandoned) phase, as stored in transcripts."""

    clicks: tuple[ClickEvent, ...]
    committed: int | None


@dataclass(frozen=True)
class PinSession:
    config: SessionConfig
    committed_digits: tuple[int, ...]
    phases_done: tuple[PhaseRecord, ...]
    current_belief: BeliefState
    current_coloring: Coloring
    learned_mapping: ButtonMapping
    phase_clicks: tuple[ClickEvent, ...]
    status: SessionStatus

    @property
    def phase_index(self) -> int:
        return len(self.phases_done)


def phase_coloring(
    config: SessionConfig, phase: int, click: int, candidates: frozenset[int]
) -> Coloring:
    """The coloring shown after ``click`` clicks of phase ``phase``."""
    rng = SplitMix64(derive_seed(config.seed, phase, click))
    return next_coloring(config.policy, candidates, rng)


def _fresh_phase_belief(config: SessionConfig, learned: ButtonMapping) -> BeliefState:
    belief = new_belief(config.n_buttons)
    if config.mode is Mode.CLASSIC:
        return seed_evidence(belief, CLASSIC_MAPPING)
    if config.carryover and learned.assigned():
        return seed_evidence(belief, learned)
    return belief


def _merge_learned(old: ButtonMapping, new: ButtonMapping) -> ButtonMapping:
    """Overlay newly implied colors; the most recent phase wins on conflict.

    Conflicts only arise without carryover, when a user changes their
    convention between digits; with carryover the new mapping always
    extends the old one.
    """
    return ButtonMapping(
        tuple(n if n is not None else o for o, n in zip(old.colors, new.colors))
    )


def start_session(config: SessionConfig) -> PinSession:
    belief = _fresh_phase_belief(config, ButtonMapping.empty(config.n_buttons))
    learned = (
        CLASSIC_MAPPING
        if config.mode is Mode.CLASSIC
        else ButtonMapping.empty(config.n_buttons)
    )
    return PinSession(
        config=config,
        committed_digits=(),
        phases_done=(),
        current_belief=belief,
        current_coloring=phase_coloring(config, 0, 0, ALL_DIGITS),
        learned_mapping=learned,
        phase_clicks=(),
        status=SessionStatus.IN_PROGRESS,
    )


def session_click(session: PinSession, button: int) -> PinSession:
    """Apply one button press; commit the digit when it becomes unique."""
    if session.status is not SessionStatus.IN_PROGRESS:
        raise InvalidStateError(
            f"session is {session.status.value}, not accepting clicks"
        )
    event = ClickEvent(session.current_coloring, button)
    belief = apply_click(session.current_belief, event)
    clicks = session.phase_clicks + (event,)
    digit = inferred_digit(belief)

    if digit is not None:
        committed = session.committed_digits + (digit,)
        learned = _merge_learned(
            session.learned_mapping, implied_mapping(belief, digit)
        )
        phases = session.phases_done + (PhaseRecord(clicks, digit),)
        if len(committed) == session.config.pin_length:
            return replace(
                session,
                committed_digits=committed,
                phases_done=phases,
                current_belief=belief,
                learned_mapping=learned,
                phase_clicks=(),
                status=SessionStatus.COMPLETE,
            )
        return replace(
            session,
            committed_digits=committed,
            phases_done=phases,
            current_belief=_fresh_phase_belief(session.config, learned),
            current_coloring=phase_coloring(
                session.config, len(phases), 0, ALL_DIGITS
            ),
            learned_mapping=learned,
            phase_clicks=(),
        )

    survivors = consistent_set(belief)
    if not survivors:
        return replace(
            session,
            current_belief=belief,
            phase_clicks=clicks,
            status=SessionStatus.ALL_INCONSISTENT,
        )
    if len(clicks) >= session.config.click_cap:
        return replace(
            session,
            current_belief=belief,
            phase_clicks=clicks,
            status=SessionStatus.CAPPED,
        )
    return replace(
        session,
        current_belief=belief,
        current_coloring=phase_coloring(
            session.config, session.phase_index, len(clicks), survivors
        ),
        phase_clicks=clicks,
    )


def reset_phase(session: PinSession) -> PinSession:
    """Abandon the current phase and restart it with a fresh belief.

    The abandoned clicks stay in the transcript (committed = null) so
    replays see exactly what happened.  Resetting an untouched phase is
    a no-op; a completed session cannot be reset.
    """
    if session.status is SessionStatus.COMPLETE:
        raise InvalidStateError("session is complete")
    if not session.phase_clicks:
        return replace(session, status=SessionStatus.IN_PROGRESS)
    phases = session.phases_done + (PhaseRecord(session.phase_clicks, None),)
    return replace(
        session,
        phases_done=phases,
        current_belief=_fresh_phase_belief(session.config, session.learned_mapping),
        current_coloring=phase_coloring(session.config, len(phases), 0, ALL_DIGITS),
        phase_clicks=(),
        status=SessionStatus.IN_PROGRESS,
    )


# ---------------------------------------------------------------------------
# View projection


@dataclass(frozen=True)
class DashboardRow:
    digit: int
    dots: tuple[str, ...]
    consistent: bool


@dataclass(frozen=True)
class ViewState:
    """Everything the UI may show. Derived purely from public session data."""

    pin_committed: int
    pin_length: int
    digit_colors: str
    buttons: tuple[str | None, ...]
    dashboard: tuple[DashboardRow, ...]
    status: SessionStatus

    def to_dict(self) -> dict[str, Any]:
        return {
            "pin": {"committed": self.pin_committed, "length": self.pin_length},
            "digit_colors": self.digit_colors,
            "buttons": list(self.buttons),
            "dashboard": [
                {"digit": row.digit, "dots": list(row.dots), "consistent": row.consistent}
                for row in self.dashboard
            ],
            "status": self.status.value,
        }


def _dots(evidence: frozenset[Color]) -> str:
    return "".join(c.symbol for c in sorted(evidence))


def current_view(session: PinSession) -> ViewState:
    """Project the session for display.

    Button colors are public in classic mode; in self-calibrating mode
    they stay neutral until the session completes, at which point the
    learned mapping is revealed together with the PIN.
    """
    config = session.config
    if config.mode is Mode.CLASSIC:
        shown = CLASSIC_MAPPING
    elif session.status is SessionStatus.COMPLETE:
        shown = session.learned_mapping
    else:
        shown = ButtonMapping.empty(config.n_buttons)
    buttons = tuple(c.symbol if c is not None else None for c in shown.colors)
    dashboard = tuple(
        DashboardRow(
            digit=hyp.digit,
            dots=tuple(_dots(seen) for seen in hyp.evidence),
            consistent=hyp.consistent,
        )
        for hyp in session.current_belief.hypotheses
    )
    return ViewState(
        pin_committed=len(session.committed_digits),
        pin_length=config.pin_length,
        digit_colors=session.current_coloring.as_string(),
        buttons=buttons,
        dashboard=dashboard,
        status=session.status,
    )


# ---------------------------------------------------------------------------
# Transcripts


@dataclass(frozen=True)
class Transcript:
    """Machine-readable record of a session: what a shoulder surfer sees."""

    version: int
    mode: Mode
    n_buttons: int
    pin_length: int
    seed: int
    policy: PolicyKind
    carryover: bool
    phases: tuple[PhaseRecord, ...]

    def config(self, click_cap: int = DEFAULT_CLICK_CAP) -> SessionConfig:
        return SessionConfig(
            mode=self.mode,
            n_buttons=self.n_buttons,
            pin_length=self.pin_length,
            policy=self.policy,
            seed=self.seed,
            carryover=self.carryover,
            click_cap=click_cap,
        )

    def to_json_obj(self) -> dict[str, Any]:
        return {
            "version": self.version,
            "mode": self.mode.value,
            "n_buttons": self.n_buttons,
            "pin_length": self.pin_length,
            "seed": self.seed,
            "policy": self.policy.value,
            "carryover": self.carryover,
            "phases": [
                {
                    "clicks": [
                        {
                            "coloring": click.coloring.as_string(),
                            "button": click.button,
                        }
                        for click in phase.clicks
                    ],
                    "committed": phase.committed,
                }
                for phase in self.phases
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2) + "\n"


def export_transcript(session: PinSession) -> Transcript:
    phases = session.phases_done
    if session.status is not SessionStatus.COMPLETE:
        phases = phases + (PhaseRecord(session.phase_clicks, None),)
    return Transcript(
        version=TRANSCRIPT_VERSION,
        mode=session.config.mode,
        n_buttons=session.config.n_buttons,
        pin_length=session.config.pin_length,
        seed=session.config.seed,
        policy=session.config.policy,
        carryover=session.config.carryover,
        phases=phases,
    )


_TOP_LEVEL_FIELDS = (
    "version",
    "mode",
    "n_buttons",
    "pin_length",
    "seed",
    "policy",
    "carryover",
    "phases",
)


def _require(obj: dict, key: str, kind: type | tuple, where: str) -> Any:
    if key not in obj:
        raise TranscriptParseError(f"missing field {key!r}", where or key)
    value = obj[key]
    if kind is int and isinstance(value, bool):
        raise TranscriptParseError(f"field {key!r} must be an integer", _join(where, key))
    if not isinstance(value, kind):
        kind_name = kind.__name__ if isinstance(kind, type) else "value"
        raise TranscriptParseError(
            f"field {key!r} must be {kind_name}", _join(where, key)
        )
    return value


def _join(where: str, key: str) -> str:
    return f"{where}.{key}" if where else key


def _reject_unknown(obj: dict, allowed: tuple[str, ...], where: str) -> None:
    unknown = sorted(set(obj) - set(allowed))
    if unknown:
        raise TranscriptParseError(
            f"unknown field {unknown[0]!r}", _join(where, unknown[0])
        )


def _parse_coloring(text: Any, where: str) -> Coloring:
    if not isinstance(text, str) or len(text) != N_DIGITS:
        raise TranscriptParseError(
            f"coloring must be a {N_DIGITS}-character string", where
        )
    if set(text) - {"Y", "G"}:
        raise TranscriptParseError("coloring may only contain 'Y' and 'G'", where)
    if "Y" not in text or "G" not in text:
        raise TranscriptParseError("coloring must show both colors", where)
    return Coloring.from_string(text)


def import_transcript(document: str | bytes) -> Transcript:
    """Parse and validate a transcript document.

    Rejects unknown fields and reports the offending field path on any
    schema violation.
    """
    if isinstance(document, bytes):
        document = document.decode("utf-8")
    try:
        obj = json.loads(document)
    except json.JSONDecodeError as exc:
        raise TranscriptParseError(f"invalid JSON: {exc.msg}", "") from exc
    if not isinstance(obj, dict):
        raise TranscriptParseError("document must be a JSON object", "")
    _reject_unknown(obj, _TOP_LEVEL_FIELDS, "")

    version = _require(obj, "version", int, "")
    if version != TRANSCRIPT_VERSION:
        raise TranscriptParseError(
            f"unsupported version {version}, expected {TRANSCRIPT_VERSION}", "version"
        )
    mode_name = _require(obj, "mode", str, "")
    try:
        mode = Mode.from_name(mode_name)
    except InvalidConfigError as exc:
        raise TranscriptParseError(str(exc), "mode") from exc
    n_buttons = _require(obj, "n_buttons", int, "")
    pin_length = _require(obj, "pin_length", int, "")
    seed = _require(obj, "seed", int, "")
    policy_name = _require(obj, "policy", str, "")
    try:
        policy = PolicyKind.from_name(policy_name)
    except InvalidConfigError as exc:
        raise TranscriptParseError(str(exc), "policy") from exc
    carryover = _require(obj, "carryover", bool, "")
    phases_raw = _require(obj, "phases", list, "")

    if mode is Mode.CLASSIC and n_buttons != 2:
        raise TranscriptParseError("classic mode uses exactly 2 buttons", "n_buttons")
    if n_buttons < 2:
        raise TranscriptParseError("n_buttons must be at least 2", "n_buttons")
    if pin_length < 1:
        raise TranscriptParseError("pin_length must be at least 1", "pin_length")
    if not 0 <= seed <= MAX_SEED:
        raise TranscriptParseError("seed must fit in 64 bits", "seed")

    phases: list[PhaseRecord] = []
    for i, phase_raw in enumerate(phases_raw):
        where = f"phases[{i}]"
        if not isinstance(phase_raw, dict):
            raise TranscriptParseError("phase must be an object", where)
        _reject_unknown(phase_raw, ("clicks", "committed"), where)
        clicks_raw = _require(phase_raw, "clicks", list, where)
        if "committed" not in phase_raw:
            raise TranscriptParseError("missing field 'committed'", f"{where}.committed")
        committed = phase_raw["committed"]
        if committed is not None:
            if isinstance(committed, bool) or not isinstance(committed, int):
                raise TranscriptParseError(
                    "committed must be a digit or null", f"{where}.committed"
                )
            if not 0 <= committed <= 9:
                raise TranscriptParseError(
                    "committed must be in 0..9", f"{where}.committed"
                )
        clicks: list[ClickEvent] = []
        for j, click_raw in enumerate(clicks_raw):
            click_where = f"{where}.clicks[{j}]"
            if not isinstance(click_raw, dict):
                raise TranscriptParseError("click must be an object", click_where)
            _reject_unknown(click_raw, ("coloring", "button"), click_where)
            if "coloring" not in click_raw:
                raise TranscriptParseError(
                    "missing field 'coloring'", f"{click_where}.coloring"
                )
            coloring = _parse_coloring(
                click_raw["coloring"], f"{click_where}.coloring"
            )
            button = _require(click_raw, "button", int, click_where)
            if not 0 <= button < n_buttons:
                raise TranscriptParseError(
                    f"button must be in 0..{n_buttons - 1}", f"{click_where}.button"
                )
            clicks.append(ClickEvent(coloring, button))
        phases.append(PhaseRecord(tuple(clicks), committed))

    return Transcript(
        version=version,
        mode=mode,
        n_buttons=n_buttons,
        pin_length=pin_length,
        seed=seed,
        policy=policy,
        carryover=carryover,
        phases=tuple(phases),
    )


# ---------------------------------------------------------------------------
# Replay


@dataclass(frozen=True)
class PhaseReplay:
    committed: int | None
    commit_click: int | None
    matches_recorded: bool


@dataclass(frozen=True)
class ReplayResult:
    phases: tuple[PhaseReplay, ...]
    committed_digits: tuple[int, ...]
    matches_recorded: bool


def replay_transcript(transcript: Transcript) -> ReplayResult:
    """Re-run a transcript's clicks through the engine.

    Uses the recorded colorings (so hand-written transcripts replay
    too), recomputes each phase's committed digit and checks it against
    the recorded one.  Carryover seeding is reproduced from the
    recomputed commitments.
    """
    learned = (
        CLASSIC_MAPPING
        if transcript.mode is Mode.CLASSIC
        else ButtonMapping.empty(transcript.n_buttons)
    )
    results: list[PhaseReplay] = []
    committed_digits: list[int] = []
    for phase in transcript.phases:
        belief = new_belief(transcript.n_buttons)
        if transcript.mode is Mode.CLASSIC:
            belief = seed_evidence(belief, CLASSIC_MAPPING)
        elif transcript.carryover and learned.assigned():
            belief = seed_evidence(belief, learned)
        commit: int | None = None
        commit_click: int | None = None
        for k, click in enumerate(phase.clicks):
            belief = apply_click(belief, click)
            digit = inferred_digit(belief)
            if digit is not None and commit is None:
                commit, commit_click = digit, k
        if commit is not None:
            committed_digits.append(commit)
            learned = _merge_learned(learned, implied_mapping(belief, commit))
        results.append(
            PhaseReplay(
                committed=commit,
                commit_click=commit_click,
                matches_recorded=commit == phase.committed,
            )
        )
    return ReplayResult(
        phases=tuple(results),
        committed_digits=tuple(committed_digits),
        matches_recorded=all(r.matches_recorded for r in results),
    )


def views_from_transcript(
    transcript: Transcript, click_cap: int = DEFAULT_CLICK_CAP
) -> list[ViewState]:
    """Recompute every intermediate view from a session's own export.

    Replays the recorded button presses through a fresh session built
    from the echoed config; raises if the recorded colorings diverge
    from the regenerated ones (which would mean the transcript did not
    come from this config/seed).
    """
    session = start_session(transcript.config(click_cap))
    views = [current_view(session)]
    for phase in transcript.phases:
        for click in phase.clicks:
            if session.current_coloring != click.coloring:
                raise InvalidStateError(
                    "recorded coloring diverges from the session's schedule"
                )
            session = session_click(session, click.button)
            views.append(current_view(session))
    return views
