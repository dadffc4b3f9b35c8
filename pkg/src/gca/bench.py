"""Wall-clock benchmarking of the screening pipeline over (x, level) grids."""

from __future__ import annotations

import statistics
import time

from .model import Network
from .screening import ScreeningConfig, screen


def run_bench(
    net: Network,
    xs: list[int],
    levels: list[int],
    reps: int = 3,
    top_percent: float = 10.0,
    jobs: int = 1,
    pause_s: float = 0.0,
    warmup: bool = True,
) -> list[dict]:
    """Time full ``screen`` runs for every (x, level) cell.

    Each cell is repeated ``reps`` times (at least 3 recommended); every
    repetition is emitted as its own row so downstream tools can draw
    distributions, with the cell median repeated on each row.

    ``pause_s`` sleeps before each repetition; on machines with CPU
    quotas the cooldown keeps throttling stalls out of the samples.
    ``warmup`` runs one untimed screen first so the initial cell does not
    absorb cold-cache costs.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if warmup:
        screen(net, ScreeningConfig(x=xs[0], search_level=levels[0], top_percent=top_percent))
    rows: list[dict] = []
    for x in xs:
        for level in levels:
            cfg = ScreeningConfig(x=x, search_level=level, top_percent=top_percent)
            times = []
            for _ in range(reps):
                if pause_s > 0:
                    time.sleep(pause_s)
                start = time.perf_counter()
                screen(net, cfg, jobs=jobs)
                times.append(time.perf_counter() - start)
            median = statistics.median(times)
            for rep, seconds in enumerate(times):
                rows.append(
                    {
                        "x": x,
                        "search_level": level,
                        "rep": rep,
                        "seconds": seconds,
                        "median_seconds": median,
                    }
                )
    return rows


def cell_medians(rows: list[dict]) -> dict[tuple[int, int], float]:
    """(x, level) -> median seconds, from ``run_bench`` rows."""
    out: dict[tuple[int, int], float] = {}
    for row in rows:
        out[(row["x"], row["search_level"])] = row["median_seconds"]
    return out
