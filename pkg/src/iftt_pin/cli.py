"""Command-line front door: demo, simulate, crack, serve.

Exit codes are stable: 0 success, 2 usage error, 3 ambiguous crack,
4 transcript parse error, 5 port bind failure.
"""

from __future__ import annotations

import argparse
import os
import sys
import threading
from pathlib import Path

from .bridge import ProtocolServer, UiHttpServer
from .cracker import crack_transcript
from .errors import PinEntryError, TranscriptParseError
from .policies import PolicyKind
from .session import (
    Mode,
    SessionConfig,
    SessionStatus,
    current_view,
    export_transcript,
    reset_phase,
    session_click,
    start_session,
)
from .simulation import BatchConfig, run_batch, stats_to_csv

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_AMBIGUOUS = 3
EXIT_PARSE = 4
EXIT_BIND = 5

_ANSI = {
    "Y": "\x1b[30;43m",  # black on yellow
    "G": "\x1b[37;100m",  # white on grey
    "reset": "\x1b[0m",
}


def _default_seed() -> int:
    raw = os.environ.get("IFTT_PIN_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--mode", choices=[m.value for m in Mode], default="selfcal",
        help="entry mode (default: selfcal)",
    )
    p.add_argument(
        "--buttons", type=int, default=None,
        help="number of buttons (default: 9 selfcal, 2 classic)",
    )
    p.add_argument(
        "--policy", choices=[k.value for k in PolicyKind], default="random_balanced",
        help="coloring policy (default: random_balanced)",
    )
    p.add_argument("--seed", type=int, default=None, help="random seed (64-bit)")
    p.add_argument(
        "--cap", type=int, default=200, help="click cap per digit (default: 200)"
    )


def _resolve_buttons(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    mode = Mode.from_name(args.mode)
    if args.buttons is None:
        return 2 if mode is Mode.CLASSIC else 9
    if args.buttons < 2:
        parser.error("--buttons must be at least 2")
    if mode is Mode.CLASSIC and args.buttons != 2:
        parser.error("classic mode uses exactly 2 buttons")
    return args.buttons


def _session_config(
    args: argparse.Namespace, parser: argparse.ArgumentParser
) -> SessionConfig:
    try:
        return SessionConfig(
            mode=Mode.from_name(args.mode),
            n_buttons=_resolve_buttons(args, parser),
            pin_length=args.pin_length,
            policy=PolicyKind.from_name(args.policy),
            seed=args.seed if args.seed is not None else _default_seed(),
            carryover=args.carryover,
            click_cap=args.cap,
        )
    except PinEntryError as exc:
        parser.error(str(exc))
        raise AssertionError("unreachable")


def _paint(symbol: str, text: str, color: bool) -> str:
    if not color:
        return text
    return f"{_ANSI[symbol]}{text}{_ANSI['reset']}"


def _render(session, color: bool, show_dashboard: bool) -> str:
    view = current_view(session)
    lines = []
    dots = "".join(
        "*" if i < view.pin_committed else "_" for i in range(view.pin_length)
    )
    lines.append(f"PIN  [{dots}]  status: {view.status.value}")
    digit_cells = []
    for d in range(10):
        symbol = view.digit_colors[d]
        digit_cells.append(_paint(symbol, f" {d}:{symbol} ", color))
    lines.append("digits  " + "".join(digit_cells))
    button_cells = []
    for b, assigned in enumerate(view.buttons):
        label = f"[{b + 1}:{assigned}]" if assigned else f"[{b + 1}]"
        button_cells.append(_paint(assigned, label, color) if assigned else label)
    lines.append("buttons " + " ".join(button_cells))
    if show_dashboard:
        lines.append("dashboard (rows: digit, cells: per-button evidence)")
        for row in view.dashboard:
            mark = " " if row.consistent else "x"
            cells = " ".join(f"{dot or '.':>2}" for dot in row.dots)
            lines.append(f"  {mark} {row.digit}  {cells}")
    return "\n".join(lines)


def cmd_demo(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    config = _session_config(args, parser)
    color = not args.no_color and sys.stdout.isatty()
    session = start_session(config)
    out = sys.stdout
    print(
        f"{config.mode.value} entry, {config.n_buttons} buttons, "
        f"PIN length {config.pin_length}, seed {config.seed}",
        file=out,
    )
    print(
        "keys: 1-%d press button, d toggle dashboard, r reset phase, q quit"
        % config.n_buttons,
        file=out,
    )
    show_dashboard = args.dashboard
    print(_render(session, color, show_dashboard), file=out)
    for line in sys.stdin:
        key = line.strip()[:1]
        if not key:
            continue
        if key == "q":
            break
        if key == "d":
            show_dashboard = not show_dashboard
        elif key == "r":
            if session.status is SessionStatus.COMPLETE:
                print("session complete; nothing to reset", file=out)
            else:
                session = reset_phase(session)
        elif key.isdigit() and key != "0":
            button = int(key) - 1
            if button >= config.n_buttons:
                print(f"no button {key}", file=out)
                continue
            if session.status is not SessionStatus.IN_PROGRESS:
                print(
                    f"session is {session.status.value}; r to reset, q to quit",
                    file=out,
                )
                continue
            before = len(session.committed_digits)
            session = session_click(session, button)
            if len(session.committed_digits) > before:
                print(
                    f"digit {len(session.committed_digits)}/{config.pin_length} "
                    "committed",
                    file=out,
                )
        else:
            print(f"unknown key {key!r}", file=out)
            continue
        print(_render(session, color, show_dashboard), file=out)
        if session.status is SessionStatus.COMPLETE:
            pin = "".join(str(d) for d in session.committed_digits)
            mapping = " ".join(
                f"{b + 1}:{c.symbol}" if c is not None else f"{b + 1}:?"
                for b, c in enumerate(session.learned_mapping.colors)
            )
            print(f"PIN: {pin}", file=out)
            print(f"your button colors: {mapping}", file=out)
            break
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    try:
        config = BatchConfig(
            mode=Mode.from_name(args.mode),
            n_buttons=_resolve_buttons(args, parser),
            policy=PolicyKind.from_name(args.policy),
            reuse_bias=args.reuse_bias,
            click_cap=args.cap,
        )
        seed = args.seed if args.seed is not None else _default_seed()
        stats = run_batch(config, args.trials, seed)
    except PinEntryError as exc:
        parser.error(str(exc))
        raise AssertionError("unreachable")
    csv_text = stats_to_csv(stats)
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
        summary_file = sys.stdout
    else:
        sys.stdout.write(csv_text)
        summary_file = sys.stderr
    print(
        f"trials={stats.trials} success_rate={stats.success_rate:.4f} "
        f"wrong_digit_rate={stats.wrong_digit_rate:.4f}",
        file=summary_file,
    )
    print("clicks histogram:", file=summary_file)
    for clicks, count in stats.click_histogram.items():
        print(f"  {clicks}: {count}", file=summary_file)
    return EXIT_OK


def cmd_crack(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    path = Path(args.transcript)
    try:
        document = path.read_bytes()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    try:
        from .session import import_transcript

        transcript = import_transcript(document)
        report = crack_transcript(transcript)
    except TranscriptParseError as exc:
        print(f"transcript parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    sys.stdout.write(report.to_json())
    return EXIT_OK if report.unique else EXIT_AMBIGUOUS


def cmd_serve(args: argparse.Namespace, parser: argparse.ArgumentParser) -> int:
    defaults = _session_config(args, parser)
    try:
        server = ProtocolServer((args.host, args.port), defaults, args.cap)
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_BIND
    http_server = None
    if not args.no_http:
        http_port = args.http_port if args.http_port is not None else args.port + 1
        ui_dir = Path(args.ui_dir) if args.ui_dir else None
        try:
            http_server = UiHttpServer(
                (args.host, http_port), defaults, args.cap, ui_dir
            )
        except OSError as exc:
            server.server_close()
            print(f"cannot bind {args.host}:{http_port}: {exc}", file=sys.stderr)
            return EXIT_BIND
        threading.Thread(target=http_server.serve_forever, daemon=True).start()
        print(
            f"ui:       http://{args.host}:{http_port}/ (websocket at /ws)",
            file=sys.stderr,
        )
    print(f"protocol: ndjson on {args.host}:{args.port}", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        if http_server is not None:
            http_server.server_close()
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iftt-pin",
        description="Self-calibrating PIN entry: demo it, measure it, attack it.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    demo = sub.add_parser("demo", help="interactive terminal demo")
    _add_session_flags(demo)
    demo.add_argument("--pin-length", type=int, default=4)
    demo.add_argument("--carryover", action=argparse.BooleanOptionalAction, default=True)
    demo.add_argument("--no-color", action="store_true", help="plain text output")
    demo.add_argument(
        "--dashboard", action="store_true", help="start with the dashboard visible"
    )
    demo.set_defaults(func=cmd_demo)

    simulate = sub.add_parser("simulate", help="Monte Carlo batch over synthetic users")
    _add_session_flags(simulate)
    simulate.add_argument("--trials", type=int, default=1000)
    simulate.add_argument(
        "--reuse-bias", type=float, default=0.0,
        help="probability of reusing the last button of the needed color",
    )
    simulate.add_argument("--out", help="write CSV here instead of stdout")
    simulate.set_defaults(func=cmd_simulate)

    crack = sub.add_parser("crack", help="recover the PIN from a transcript")
    crack.add_argument("transcript", help="path to a transcript JSON file")
    crack.set_defaults(func=cmd_crack)

    serve = sub.add_parser("serve", help="host sessions for UI clients")
    _add_session_flags(serve)
    serve.add_argument("--pin-length", type=int, default=4)
    serve.add_argument("--carryover", action=argparse.BooleanOptionalAction, default=True)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8470)
    serve.add_argument(
        "--http-port", type=int, default=None,
        help="companion HTTP/WebSocket port (default: protocol port + 1)",
    )
    serve.add_argument("--no-http", action="store_true", help="NDJSON protocol only")
    serve.add_argument(
        "--ui-dir", default="frontend",
        help="directory with the built web UI (default: ./frontend)",
    )
    serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    # simulate/crack have no pin_length/carryover flags; give defaults for
    # the shared config builder.
    if not hasattr(args, "pin_length"):
        args.pin_length = 4
    if not hasattr(args, "carryover"):
        args.carryover = True
    return args.func(args, parser)


if __name__ == "__main__":
    sys.exit(main())
