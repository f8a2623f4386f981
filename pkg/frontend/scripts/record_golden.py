"""Regenerate the golden protocol fixtures from the session bridge.

Run from the frontend directory (the primary package must be importable):

    python3 scripts/record_golden.py

Everything here is seeded, so reruns are byte-identical; the vitest
suite replays these fixtures against a live bridge and asserts the
recorded conversation still holds.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent.parent / "src"))

from iftt_pin.bridge import SessionSlot, handle_message, hello_message
from iftt_pin.engine import apply_click, implied_mapping, inferred_digit, new_belief
from iftt_pin.rng import SplitMix64
from iftt_pin.session import Mode, SessionConfig, SessionStatus
from iftt_pin.simulation import SimulatedUser, random_valid_mapping

GOLDEN = Path(__file__).resolve().parent.parent / "golden"

FIGURE_SCRIPT = (
    ("YGGYYYGGYG", 0),
    ("YYGGYGYGGY", 4),
    ("YGGYGYYGGG", 0),
    ("GYYGYYGYGY", 4),
    ("GYGYYGYGGG", 1),
    ("YYYYGGGGGY", 1),
    ("GGYYYYGGYG", 3),
    ("YYGYGGYGGY", 0),
)


def scripted_user_buttons(config: SessionConfig, user_seed: int, digit: int) -> list[int]:
    """Buttons a seeded synthetic user presses to complete the session."""
    from iftt_pin.session import session_click, start_session

    rng = SplitMix64(user_seed)
    user = SimulatedUser(digit, random_valid_mapping(config.n_buttons, rng))
    session = start_session(config)
    buttons: list[int] = []
    while session.status is SessionStatus.IN_PROGRESS:
        button = user.choose_button(session.current_coloring, rng)
        buttons.append(button)
        session = session_click(session, button)
    assert session.status is SessionStatus.COMPLETE
    return buttons


def record_conversation(client_script: list[dict]) -> list[dict]:
    slot = SessionSlot(SessionConfig(mode=Mode.SELFCAL, n_buttons=9, pin_length=4, seed=0))
    messages = [hello_message()]
    for msg in client_script:
        messages.extend(handle_message(slot, msg))
    return messages


def make_protocol_golden() -> None:
    config = SessionConfig(mode=Mode.SELFCAL, n_buttons=9, pin_length=1, seed=7)
    buttons = scripted_user_buttons(config, user_seed=41, digit=3)
    script: list[dict] = [
        {
            "type": "configure",
            "mode": "selfcal",
            "n_buttons": 9,
            "pin_length": 1,
            "seed": 7,
            "carryover": True,
        },
        {"type": "click", "button": 12},  # recorded error: bad-button
    ]
    script += [{"type": "click", "button": b} for b in buttons]
    script.append({"type": "export"})
    (GOLDEN / "client_script.json").write_text(
        json.dumps(script, indent=2) + "\n"
    )
    (GOLDEN / "server_messages.json").write_text(
        json.dumps(record_conversation(script), indent=2) + "\n"
    )


def make_livedemo_golden() -> None:
    config = SessionConfig(mode=Mode.SELFCAL, n_buttons=9, pin_length=4, seed=2024)
    digit = 6
    buttons = scripted_user_buttons(config, user_seed=9, digit=digit)
    slot = SessionSlot(SessionConfig(mode=Mode.SELFCAL, n_buttons=9, pin_length=4, seed=0))
    configure = {
        "type": "configure",
        "mode": "selfcal",
        "n_buttons": 9,
        "pin_length": 4,
        "seed": 2024,
        "carryover": True,
    }
    handle_message(slot, configure)
    complete = None
    for button in buttons:
        for reply in handle_message(slot, {"type": "click", "button": button}):
            if reply["type"] == "complete":
                complete = reply
    assert complete is not None
    (GOLDEN / "livedemo.json").write_text(
        json.dumps(
            {
                "configure": configure,
                "clicks": buttons,
                "pin": complete["pin"],
                "mapping": complete["mapping"],
            },
            indent=2,
        )
        + "\n"
    )


def make_figure_states() -> None:
    """State messages for the hand-scripted walkthrough, straight off the engine."""
    belief = new_belief(9)
    states = []
    for text, button in FIGURE_SCRIPT:
        from iftt_pin.engine import ClickEvent, Coloring

        belief = apply_click(belief, ClickEvent(Coloring.from_string(text), button))
        digit = inferred_digit(belief)
        committed = 1 if digit is not None else 0
        buttons: list[str | None] = [None] * 9
        if digit is not None:
            for b, color in implied_mapping(belief, digit).assigned().items():
                buttons[b] = color.symbol
        states.append(
            {
                "type": "state",
                "pin": {"committed": committed, "length": 1},
                "digit_colors": text,
                "buttons": buttons,
                "dashboard": [
                    {
                        "digit": hyp.digit,
                        "dots": [
                            "".join(c.symbol for c in sorted(seen))
                            for seen in hyp.evidence
                        ],
                        "consistent": hyp.consistent,
                    }
                    for hyp in belief.hypotheses
                ],
                "status": "complete" if digit is not None else "in_progress",
            }
        )
    (GOLDEN / "figure3_states.json").write_text(json.dumps(states, indent=2) + "\n")
    transcript = {
        "version": 1,
        "mode": "selfcal",
        "n_buttons": 9,
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
                "committed": 3,
            }
        ],
    }
    (GOLDEN / "figure3_transcript.json").write_text(
        json.dumps(transcript, indent=2) + "\n"
    )


def main() -> None:
    GOLDEN.mkdir(exist_ok=True)
    make_protocol_golden()
    make_livedemo_golden()
    make_figure_states()
    for name in sorted(p.name for p in GOLDEN.iterdir()):
        print("wrote", name)


if __name__ == "__main__":
    main()
