"""Synthetic consistent users and Monte Carlo measurement.

A simulated user owns a hidden digit and a hidden total button-to-color
mapping and always presses a button whose color (in their mapping)
matches their digit's current color.  ``reuse_bias`` models the one
behavioral knob elimination speed depends on: the probability of
pressing the same button as last time that color was needed instead of
picking uniformly among all buttons of that color.

Trials derive their random streams from (seed, trial index), so batch
statistics are identical no matter how trials are scheduled.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

from .engine import (
    BeliefState,
    ButtonMapping,
    ClickEvent,
    Color,
    Coloring,
    apply_click,
    consistent_set,
    inferred_digit,
    new_belief,
    seed_evidence,
    validate_total_mapping,
)
from .errors import InvalidConfigError
from .policies import PolicyKind, next_coloring
from .rng import SplitMix64, derive_seed
from .session import (
    CLASSIC_MAPPING,
    Mode,
    PinSession,
    SessionConfig,
    SessionStatus,
    session_click,
    start_session,
)


class SimulatedUser:
    """A consistent user: fixed digit, fixed total mapping, optional habit."""

    def __init__(
        self, digit: int, mapping: ButtonMapping, reuse_bias: float = 0.0
    ) -> None:
        if not 0 <= digit <= 9:
            raise InvalidConfigError(f"digit must be in 0..9, got {digit}")
        validate_total_mapping(mapping)
        if not 0.0 <= reuse_bias <= 1.0:
            raise InvalidConfigError("reuse_bias must be in [0, 1]")
        self.digit = digit
        self.mapping = mapping
        self.reuse_bias = reuse_bias
        self._last_button: dict[Color, int] = {}

    def choose_button(self, coloring: Coloring, rng: SplitMix64) -> int:
        """Press a button whose mapped color equals the digit's current color."""
        needed = coloring[self.digit]
        valid = self.mapping.buttons_of(needed)
        previous = self._last_button.get(needed)
        if previous is not None and self.reuse_bias > 0.0:
            if self.reuse_bias >= 1.0 or rng.random() < self.reuse_bias:
                return previous
        button = valid[rng.below(len(valid))]
        self._last_button[needed] = button
        return button


def random_valid_mapping(n_buttons: int, rng: SplitMix64) -> ButtonMapping:
    """Uniform draw over the 2^N - 2 total mappings with both colors."""
    if n_buttons < 2:
        raise InvalidConfigError("need at least 2 buttons")
    top = 1 << n_buttons
    while True:
        bits = rng.below(top)
        if bits not in (0, top - 1):
            break
    return ButtonMapping(
        tuple(
            Color.YELLOW if bits & (1 << b) else Color.GREY
            for b in range(n_buttons)
        )
    )


@dataclass(frozen=True)
class PhaseOutcome:
    identified: int | None
    clicks_used: int
    capped: bool
    all_inconsistent: bool


def run_phase(
    n_buttons: int,
    policy: PolicyKind,
    user: SimulatedUser,
    click_cap: int,
    rng: SplitMix64,
    seed_mapping: ButtonMapping | None = None,
) -> tuple[list[ClickEvent], PhaseOutcome]:
    """Drive one digit-identification phase to its end.

    Stops on identification, on total inconsistency (impossible for a
    consistent user) or when the click cap is reached.  ``seed_mapping``
    pre-loads evidence, e.g. the classic fixed buttons.
    """
    if click_cap < 1:
        raise InvalidConfigError("click_cap must be at least 1")
    belief = new_belief(n_buttons)
    if seed_mapping is not None:
        belief = seed_evidence(belief, seed_mapping)
    clicks: list[ClickEvent] = []
    while True:
        coloring = next_coloring(policy, consistent_set(belief), rng)
        button = user.choose_button(coloring, rng)
        event = ClickEvent(coloring, button)
        belief = apply_click(belief, event)
        clicks.append(event)
        digit = inferred_digit(belief)
        if digit is not None:
            return clicks, PhaseOutcome(digit, len(clicks), False, False)
        if not consistent_set(belief):
            return clicks, PhaseOutcome(None, len(clicks), False, True)
        if len(clicks) >= click_cap:
            return clicks, PhaseOutcome(None, len(clicks), True, False)


@dataclass(frozen=True)
class BatchConfig:
    mode: Mode = Mode.SELFCAL
    n_buttons: int = 9
    policy: PolicyKind = PolicyKind.RANDOM_BALANCED
    reuse_bias: float = 0.0
    click_cap: int = 200

    def __post_init__(self) -> None:
        if self.mode is Mode.CLASSIC and self.n_buttons != 2:
            raise InvalidConfigError("classic mode uses exactly 2 buttons")
        if self.n_buttons < 2:
            raise InvalidConfigError("need at least 2 buttons")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    digit: int
    identified: int | None
    clicks: int
    capped: bool


@dataclass
class SimStats:
    trials: int
    success_rate: float
    wrong_digit_rate: float
    click_histogram: dict[int, int]
    records: list[TrialRecord] = field(default_factory=list, repr=False)


def run_trial(config: BatchConfig, seed: int, trial: int) -> TrialRecord:
    """One independent phase with a freshly drawn (digit, mapping)."""
    rng = SplitMix64(derive_seed(seed, trial))
    digit = rng.below(10)
    if config.mode is Mode.CLASSIC:
        mapping: ButtonMapping = CLASSIC_MAPPING
        seed_mapping: ButtonMapping | None = CLASSIC_MAPPING
    else:
        mapping = random_valid_mapping(config.n_buttons, rng)
        seed_mapping = None
    user = SimulatedUser(digit, mapping, config.reuse_bias)
    _, outcome = run_phase(
        config.n_buttons, config.policy, user, config.click_cap, rng, seed_mapping
    )
    return TrialRecord(
        trial=trial,
        digit=digit,
        identified=outcome.identified,
        clicks=outcome.clicks_used,
        capped=outcome.capped,
    )


def run_batch(config: BatchConfig, trials: int, seed: int) -> SimStats:
    """Aggregate independent trials into rates and a click histogram."""
    if trials < 1:
        raise InvalidConfigError(f"trials must be at least 1, got {trials}")
    records = [run_trial(config, seed, t) for t in range(trials)]
    identified = sum(1 for r in records if r.identified is not None)
    wrong = sum(
        1 for r in records if r.identified is not None and r.identified != r.digit
    )
    histogram: dict[int, int] = {}
    for r in records:
        histogram[r.clicks] = histogram.get(r.clicks, 0) + 1
    return SimStats(
        trials=trials,
        success_rate=identified / trials,
        wrong_digit_rate=wrong / trials,
        click_histogram=dict(sorted(histogram.items())),
        records=records,
    )


CSV_COLUMNS = ("trial", "digit", "identified", "clicks", "capped")


def stats_to_csv(stats: SimStats) -> str:
    """Render trial records as CSV, one row per trial, trailing newline."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in stats.records:
        writer.writerow(
            (
                r.trial,
                r.digit,
                "" if r.identified is None else r.identified,
                r.clicks,
                "true" if r.capped else "false",
            )
        )
    return out.getvalue()


def drive_session(
    config: SessionConfig, user: SimulatedUser, rng: SplitMix64
) -> PinSession:
    """Let a simulated user click through a whole session.

    Returns as soon as the session leaves IN_PROGRESS; callers decide
    what a capped or inconsistent end means for them.
    """
    session = start_session(config)
    while session.status is SessionStatus.IN_PROGRESS:
        button = user.choose_button(session.current_coloring, rng)
        session = session_click(session, button)
    return session
