"""Shared fixtures: the scripted eight-click sequence and small builders.

The scripted sequence reproduces the canonical walkthrough on a 9-button
pad: the user enters digit 3; clicks 2 and 4 hit the middle button with
digits 0 and 2 flipping color between them, and click 8 hits the
top-left button with digit 1's color flipped against clicks 1 and 3.
"""

from __future__ import annotations

from iftt_pin.engine import ClickEvent, Coloring

# (coloring, button) pairs; buttons: 0 = top-left, 4 = middle of a 3x3 pad.
FIGURE_SCRIPT: tuple[tuple[str, int], ...] = (
    ("YGGYYYGGYG", 0),
    ("YYGGYGYGGY", 4),
    ("YGGYGYYGGG", 0),
    ("GYYGYYGYGY", 4),
    ("GYGYYGYGGG", 1),
    ("YYYYGGGGGY", 1),
    ("GGYYYYGGYG", 3),
    ("YYGYGGYGGY", 0),
)

# Survivors after each scripted click, derived by hand and frozen:
# click 3 drops {4,6,8}, click 4 drops {0,2,5,7}, click 6 drops {9},
# click 8 drops {1}, leaving the true digit 3.
FIGURE_SURVIVORS: tuple[frozenset[int], ...] = (
    frozenset(range(10)),
    frozenset(range(10)),
    frozenset({0, 1, 2, 3, 5, 7, 9}),
    frozenset({1, 3, 9}),
    frozenset({1, 3, 9}),
    frozenset({1, 3}),
    frozenset({1, 3}),
    frozenset({3}),
)

FIGURE_N_BUTTONS = 9
FIGURE_DIGIT = 3


def figure_clicks() -> list[ClickEvent]:
    return [
        ClickEvent(Coloring.from_string(text), button)
        for text, button in FIGURE_SCRIPT
    ]


def figure_transcript_json() -> str:
    import json

    return json.dumps(
        {
            "version": 1,
            "mode": "selfcal",
            "n_buttons": FIGURE_N_BUTTONS,
            "pin_length": 1,
            "seed": 0,
            "policy": "random_balanced",
            "carryover": True,
            "phases": [
                {
                    "clicks": [
                        {"coloring": text, "button": button}
                        for text, button in FIGURE_SCRIPT
                    ],
                    "committed": FIGURE_DIGIT,
                }
            ],
        }
    )
