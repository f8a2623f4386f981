"""Belief-update engine for consistency-based PIN entry.

The engine tracks ten hypotheses, one per digit the user might be
entering.  Under hypothesis ``d``, a click on button ``b`` while digit
``d`` is colored ``c`` means "button b stands for color c".  A button
that would have to mean both colors under some hypothesis proves the
user is not entering that digit, so the hypothesis is eliminated.  The
sole surviving hypothesis is the digit, and its accumulated per-button
colors are the user's private button-to-color mapping.

Two entry modes reduce to the same update rule:

* self-calibrating: buttons start meaning nothing; evidence accrues
  from clicks alone.
* classic: the two buttons have fixed, public colors; seeding that
  fixed mapping as prior evidence makes elimination equivalent to
  intersecting announced color sets.

All state is immutable; every operation returns a new value, which is
what makes transcript replay bit-exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import (
    InconsistentHypothesisError,
    InvalidColoringError,
    InvalidConfigError,
    InvalidStateError,
    OutOfRangeError,
)

N_DIGITS = 10
DIGITS = tuple(range(N_DIGITS))


class Color(enum.IntEnum):
    """One of the two round colors. YELLOW sorts before GREY everywhere."""

    YELLOW = 0
    GREY = 1

    @property
    def symbol(self) -> str:
        return "Y" if self is Color.YELLOW else "G"

    @classmethod
    def from_symbol(cls, symbol: str) -> "Color":
        if symbol == "Y":
            return cls.YELLOW
        if symbol == "G":
            return cls.GREY
        raise InvalidColoringError(f"unknown color symbol {symbol!r}")


@dataclass(frozen=True)
class Coloring:
    """Assignment of a color to each of the ten digits for one round.

    Monochrome rounds are rejected at construction: a click under them
    is uninterpretable, so they must never reach the engine.
    """

    colors: tuple[Color, ...]

    def __post_init__(self) -> None:
        if len(self.colors) != N_DIGITS:
            raise InvalidColoringError(
                f"coloring must cover {N_DIGITS} digits, got {len(self.colors)}"
            )
        present = set(self.colors)
        if len(present) < 2:
            raise InvalidColoringError("coloring must show both colors")

    def __getitem__(self, digit: int) -> Color:
        return self.colors[digit]

    def digits_of(self, color: Color) -> frozenset[int]:
        return frozenset(d for d in DIGITS if self.colors[d] is color)

    def as_string(self) -> str:
        return "".join(c.symbol for c in self.colors)

    @classmethod
    def from_string(cls, text: str) -> "Coloring":
        return cls(tuple(Color.from_symbol(ch) for ch in text))


@dataclass(frozen=True)
class ClickEvent:
    """The atom of all inference: which coloring was up, which button was hit."""

    coloring: Coloring
    button: int


@dataclass(frozen=True)
class ButtonMapping:
    """Partial or total assignment of colors to buttons.

    ``None`` marks an unassigned button.  Totality and the
    both-colors-present rule are checked where a mapping is used as a
    user's convention (see :func:`validate_total_mapping`), not here:
    hypotheses legitimately imply total monochrome mappings for digits
    the user is not entering.
    """

    colors: tuple[Color | None, ...]

    @property
    def n_buttons(self) -> int:
        return len(self.colors)

    def __getitem__(self, button: int) -> Color | None:
        return self.colors[button]

    def assigned(self) -> dict[int, Color]:
        return {b: c for b, c in enumerate(self.colors) if c is not None}

    def is_total(self) -> bool:
        return all(c is not None for c in self.colors)

    def has_both_colors(self) -> bool:
        present = {c for c in self.colors if c is not None}
        return len(present) == 2

    def is_restriction_of(self, other: "ButtonMapping") -> bool:
        """True if every assignment here agrees with ``other``."""
        if self.n_buttons != other.n_buttons:
            return False
        return all(
            mine is None or mine is theirs
            for mine, theirs in zip(self.colors, other.colors)
        )

    def buttons_of(self, color: Color) -> tuple[int, ...]:
        return tuple(b for b, c in enumerate(self.colors) if c is color)

    @classmethod
    def empty(cls, n_buttons: int) -> "ButtonMapping":
        return cls((None,) * n_buttons)


def validate_total_mapping(mapping: ButtonMapping) -> None:
    """Reject mappings unusable as a user convention.

    A usable convention assigns every button and leaves the user at
    least one button per color to answer with.
    """
    if not mapping.is_total():
        raise InvalidConfigError("user mapping must assign every button")
    if not mapping.has_both_colors():
        raise InvalidConfigError("user mapping must use both colors")


def try_merge_mappings(a: ButtonMapping, b: ButtonMapping) -> ButtonMapping | None:
    """Union of two partial mappings, or None if they conflict on a button."""
    if a.n_buttons != b.n_buttons:
        return None
    merged: list[Color | None] = []
    for ca, cb in zip(a.colors, b.colors):
        if ca is not None and cb is not None and ca is not cb:
            return None
        merged.append(ca if ca is not None else cb)
    return ButtonMapping(tuple(merged))


# Evidence for one hypothesis: per button, the set of colors the user's
# clicks would have meant by that button if the hypothesis were true.
Evidence = tuple[frozenset[Color], ...]


@dataclass(frozen=True)
class HypothesisState:
    """One digit hypothesis with its implied per-button color evidence."""

    digit: int
    evidence: Evidence
    consistent: bool


@dataclass(frozen=True)
class BeliefState:
    """All ten hypotheses plus the click count since creation."""

    n_buttons: int
    hypotheses: tuple[HypothesisState, ...]
    click_count: int


def new_belief(n_buttons: int) -> BeliefState:
    """Fresh belief: every hypothesis consistent, no evidence yet."""
    if n_buttons < 2:
        raise InvalidConfigError(
            f"need at least 2 buttons (one per color), got {n_buttons}"
        )
    empty: Evidence = (frozenset(),) * n_buttons
    hyps = tuple(HypothesisState(d, empty, True) for d in DIGITS)
    return BeliefState(n_buttons, hyps, 0)


def apply_click(belief: BeliefState, event: ClickEvent) -> BeliefState:
    """Fold one click into every hypothesis.

    For each digit, the digit's current color joins the evidence of the
    pressed button; a button holding both colors marks its hypothesis
    inconsistent.  Evidence keeps accumulating on eliminated hypotheses
    so dashboards can show why they died; elimination itself is
    permanent.
    """
    if not 0 <= event.button < belief.n_buttons:
        raise OutOfRangeError(
            f"button {event.button} out of range for {belief.n_buttons} buttons"
        )
    updated = []
    for hyp in belief.hypotheses:
        color = event.coloring[hyp.digit]
        seen = hyp.evidence[event.button]
        if color in seen:
            updated.append(hyp)
            continue
        grown = seen | {color}
        evidence = (
            hyp.evidence[: event.button] + (grown,) + hyp.evidence[event.button + 1 :]
        )
        updated.append(
            HypothesisState(hyp.digit, evidence, hyp.consistent and len(grown) == 1)
        )
    return BeliefState(belief.n_buttons, tuple(updated), belief.click_count + 1)


def consistent_set(belief: BeliefState) -> frozenset[int]:
    """Digits whose hypothesis has survived every click so far."""
    return frozenset(h.digit for h in belief.hypotheses if h.consistent)


def inferred_digit(belief: BeliefState) -> int | None:
    """The entered digit, available once exactly one hypothesis survives."""
    survivors = [h.digit for h in belief.hypotheses if h.consistent]
    if len(survivors) == 1:
        return survivors[0]
    return None


def implied_mapping(belief: BeliefState, digit: int) -> ButtonMapping:
    """Button colors implied by a surviving hypothesis.

    Buttons whose evidence is a singleton map to that color; untouched
    buttons stay unassigned.
    """
    hyp = belief.hypotheses[digit]
    if not hyp.consistent:
        raise InconsistentHypothesisError(
            f"hypothesis for digit {digit} was eliminated"
        )
    colors = tuple(
        next(iter(seen)) if len(seen) == 1 else None for seen in hyp.evidence
    )
    return ButtonMapping(colors)


def seed_evidence(belief: BeliefState, mapping: ButtonMapping) -> BeliefState:
    """Inject known button colors into a fresh belief as prior evidence.

    Used to carry the mapping learned in earlier PIN digits into the
    next one, and to emulate classic pre-colored buttons.
    """
    if belief.click_count != 0 or any(
        seen for h in belief.hypotheses for seen in h.evidence
    ):
        raise InvalidStateError("evidence can only be seeded into a fresh belief")
    if mapping.n_buttons != belief.n_buttons:
        raise InvalidConfigError(
            f"mapping covers {mapping.n_buttons} buttons, belief has {belief.n_buttons}"
        )
    seeded: Evidence = tuple(
        frozenset((c,)) if c is not None else frozenset() for c in mapping.colors
    )
    hyps = tuple(HypothesisState(d, seeded, True) for d in DIGITS)
    return BeliefState(belief.n_buttons, hyps, 0)


def classic_intersect(
    candidates: frozenset[int], coloring: Coloring, announced: Color
) -> frozenset[int]:
    """One round of classic elimination: keep candidates of the announced color."""
    return candidates & coloring.digits_of(announced)


def count_valid_mappings(n_buttons: int) -> int:
    """Number of total button-to-color mappings usable as a convention.

    Every button takes one of two colors, minus the two monochrome
    assignments that leave the user unable to answer one color.
    """
    if n_buttons < 2:
        raise InvalidConfigError(
            f"need at least 2 buttons (one per color), got {n_buttons}"
        )
    return (1 << n_buttons) - 2
