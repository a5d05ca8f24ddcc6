"""Backend call counters, grouped by the engine phase that triggered them.

The ADAPT engine tags its work as ``selection`` / ``optimize`` / ``preopt`` /
``report``; counters record (event, phase) pairs.  This is what lets records
prove the Clifford selection path issues zero statevector simulations.
"""

from __future__ import annotations

import threading
from collections import Counter
from contextlib import contextmanager

_lock = threading.Lock()
_counters: Counter = Counter()
_phase = "default"


def bump(event: str, amount: int = 1) -> None:
    with _lock:
        _counters[(event, _phase)] += amount


@contextmanager
def phase(name: str):
    """Label all counter bumps inside the block with this phase."""
    global _phase
    prev = _phase
    _phase = name
    try:
        yield
    finally:
        _phase = prev


def current_phase() -> str:
    return _phase


def snapshot() -> dict[str, dict[str, int]]:
    """{event: {phase: count}} for all events seen so far."""
    with _lock:
        out: dict[str, dict[str, int]] = {}
        for (event, ph), count in _counters.items():
            out.setdefault(event, {})[ph] = count
        return out


def diff(before: dict[str, dict[str, int]], after: dict[str, dict[str, int]]) -> dict[str, dict[str, int]]:
    out: dict[str, dict[str, int]] = {}
    for event, phases in after.items():
        for ph, count in phases.items():
            delta = count - before.get(event, {}).get(ph, 0)
            if delta:
                out.setdefault(event, {})[ph] = delta
    return out


def reset() -> None:
    with _lock:
        _counters.clear()
