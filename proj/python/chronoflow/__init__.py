"""Python bindings for the chronoflow replay toolkit."""

import json

from ._core import (
    ChronoflowError,
    ConfigError,
    ConflictError,
    ConnectionError,
    CorruptionError,
    EmptyInputError,
    Event,
    KindMismatchError,
    NotFoundError,
    ParseError,
    RangeError,
    ScaledEvent,
    SimulatedStream,
    Store,
    StreamSegment,
    UndefinedError,
    bytes_trend_correlation,
    generate_synthetic,
    histogram,
    ingest_text,
    parse_time,
    run_cli,
    scale_stamps,
    simulate,
    volatility,
)
from . import _core

__version__ = "0.1.0"


def fidelity(segment, streams):
    """Compare each stream's per-second volatility against its source segment."""
    return json.loads(_core._fidelity_json(segment, list(streams)))


def replay(stream, sink="stdout", virtual_clock=True):
    """Replay a stream into a sink and return the run report as a dict.

    With virtual_clock the schedule is kept but nothing sleeps.
    """
    return json.loads(_core._replay_json(stream, sink, virtual_clock))
