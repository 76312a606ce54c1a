"""Best-effort extraction of per-phase timings from Hadoop job output."""

from __future__ import annotations

import re

# Standard job-counter lines printed by the job client and preserved in
# aggregated YARN logs. Shuffle timing is not a stock counter on every
# version, so its line is matched permissively and simply omitted when absent.
_PATTERNS = {
    "map": re.compile(r"Total time spent by all map tasks \(ms\)=(\d+)"),
    "reduce": re.compile(r"Total time spent by all reduce tasks \(ms\)=(\d+)"),
    "shuffle": re.compile(r"(?:Total )?[Ss]huffle time \(ms\)=(\d+)"),
}


def parse_phase_times(log_text: str) -> dict[str, float]:
    """Phase name -> seconds for every phase found in log_text.

    Never raises on arbitrary text; unmatched phases are simply omitted.
    When a counter appears multiple times the last occurrence wins.
    """
    phases: dict[str, float] = {}
    for phase, pattern in _PATTERNS.items():
        matches = pattern.findall(log_text)
        if matches:
            phases[phase] = int(matches[-1]) / 1000.0
    return phases
