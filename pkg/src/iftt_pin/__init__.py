"""Self-calibrating PIN entry by consistency elimination.

The interface never learns the user's button colors up front: it infers
the PIN digit and the private button-to-color mapping simultaneously,
from the single assumption that one button means one color.
"""

from .engine import (
    BeliefState,
    ButtonMapping,
    ClickEvent,
    Color,
    Coloring,
    apply_click,
    classic_intersect,
    consistent_set,
    count_valid_mappings,
    implied_mapping,
    inferred_digit,
    new_belief,
    seed_evidence,
)
from .errors import (
    InconsistentHypothesisError,
    InvalidColoringError,
    InvalidConfigError,
    InvalidStateError,
    NothingToSplitError,
    OutOfRangeError,
    PinEntryError,
    TranscriptParseError,
)
from .policies import PolicyKind, bisect_coloring, next_coloring, random_balanced_coloring
from .session import (
    Mode,
    PinSession,
    SessionConfig,
    SessionStatus,
    Transcript,
    current_view,
    export_transcript,
    import_transcript,
    replay_transcript,
    reset_phase,
    session_click,
    start_session,
)
from .simulation import (
    BatchConfig,
    PhaseOutcome,
    SimStats,
    SimulatedUser,
    drive_session,
    run_batch,
    run_phase,
)
from .cracker import CrackReport, crack_phase, crack_transcript

__version__ = "0.1.0"

__all__ = [
    "BeliefState",
    "ButtonMapping",
    "ClickEvent",
    "Color",
    "Coloring",
    "apply_click",
    "classic_intersect",
    "consistent_set",
    "count_valid_mappings",
    "implied_mapping",
    "inferred_digit",
    "new_belief",
    "seed_evidence",
    "PolicyKind",
    "bisect_coloring",
    "next_coloring",
    "random_balanced_coloring",
    "Mode",
    "PinSession",
    "SessionConfig",
    "SessionStatus",
    "Transcript",
    "current_view",
    "export_transcript",
    "import_transcript",
    "replay_transcript",
    "reset_phase",
    "session_click",
    "start_session",
    "BatchConfig",
    "PhaseOutcome",
    "SimStats",
    "SimulatedUser",
    "drive_session",
    "run_batch",
    "run_phase",
    "CrackReport",
    "crack_phase",
    "crack_transcript",
    "PinEntryError",
    "InvalidConfigError",
    "InvalidColoringError",
    "InvalidStateError",
    "InconsistentHypothesisError",
    "NothingToSplitError",
    "OutOfRangeError",
    "TranscriptParseError",
]
