"""Per-round coloring generation.

Two strategies: the default uniform 5/5 split of the digit grid, and an
opt-in bisecting split that halves the surviving candidate set each
round (useful in classic mode, where candidates are public anyway).
Both draw from caller-owned SplitMix64 streams, so a coloring is a pure
function of (policy, candidates, stream state).
"""

from __future__ import annotations

import enum

from .engine import Color, Coloring, DIGITS, N_DIGITS
from .errors import InvalidConfigError, NothingToSplitError
from .rng import SplitMix64


class PolicyKind(enum.Enum):
    RANDOM_BALANCED = "random_balanced"
    BISECT = "bisect"

    @classmethod
    def from_name(cls, name: str) -> "PolicyKind":
        for kind in cls:
            if kind.value == name:
                return kind
        raise InvalidConfigError(f"unknown policy {name!r}")


def random_balanced_coloring(rng: SplitMix64) -> Coloring:
    """Uniform draw among the C(10,5) = 252 balanced colorings."""
    order = list(DIGITS)
    rng.shuffle(order)
    yellow = set(order[: N_DIGITS // 2])
    return Coloring(
        tuple(Color.YELLOW if d in yellow else Color.GREY for d in DIGITS)
    )


def bisect_coloring(candidates: frozenset[int], rng: SplitMix64) -> Coloring:
    """Split the candidate set floor/ceil between the colors.

    Non-candidate digits are dealt out to keep the full grid as close
    to 5/5 as possible; they carry no information, the balance is
    purely cosmetic.  Both colors always appear because each side of
    the candidate split is non-empty.
    """
    if len(candidates) < 2:
        raise NothingToSplitError(
            f"bisection needs at least 2 candidates, got {len(candidates)}"
        )
    cands = sorted(candidates)
    rng.shuffle(cands)
    half = len(cands) // 2
    # Which color receives the floor half is part of the draw.
    floor_color = Color.YELLOW if rng.below(2) == 0 else Color.GREY
    ceil_color = Color.GREY if floor_color is Color.YELLOW else Color.YELLOW
    assignment: dict[int, Color] = {}
    for d in cands[:half]:
        assignment[d] = floor_color
    for d in cands[half:]:
        assignment[d] = ceil_color
    rest = [d for d in DIGITS if d not in candidates]
    rng.shuffle(rest)
    yellow_so_far = sum(1 for c in assignment.values() if c is Color.YELLOW)
    fill_yellow = max(0, min(len(rest), N_DIGITS // 2 - yellow_so_far))
    for i, d in enumerate(rest):
        assignment[d] = Color.YELLOW if i < fill_yellow else Color.GREY
    return Coloring(tuple(assignment[d] for d in DIGITS))


def next_coloring(
    policy: PolicyKind, candidates: frozenset[int], rng: SplitMix64
) -> Coloring:
    """Dispatch to the configured strategy."""
    if not candidates:
        raise NothingToSplitError("no candidates left to color for")
    if policy is PolicyKind.RANDOM_BALANCED:
        return random_balanced_coloring(rng)
    if policy is PolicyKind.BISECT:
        return bisect_coloring(candidates, rng)
    raise InvalidConfigError(f"unknown policy {policy!r}")
