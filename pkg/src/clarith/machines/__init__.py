"""Interactive machines: abstract strategies, toy tape machines and exhaustive verification."""

from .strategy import (
    FunctionStrategy,
    ScheduleOverrun,
    Session,
    SilentStrategy,
    Strategy,
    Transcript,
    meters,
    run_scheduled,
)
from .verify import EAGER, QUIET, OracleStrategy, RejectedMove, play_line, verify_win
