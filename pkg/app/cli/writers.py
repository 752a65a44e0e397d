"""
Output writers — CSV / JSON series files and gnuplot plot scripts.

Every file goes through ``atomic_write`` so a failed run never leaves a
partial file behind.
"""

import csv
import io
import logging
import os
import tempfile
from typing import Iterable, Optional

import numpy as np

from app.models import SweepSeries

logger = logging.getLogger(__name__)

CSV_HEADER = ("t_prime", "concurrence", "bsm_success_prob", "defined")
DEFAULT_DIGITS = 12


def atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    logger.info("[cli] wrote %s (%d bytes)", path, len(text))


def _fmt(value: float, digits: int) -> str:
    """Scientific notation with exactly *digits* significant digits."""
    if np.isnan(value):
        return "nan"
    return f"{value:.{digits - 1}e}"


def series_to_csv(series: SweepSeries, digits: int = DEFAULT_DIGITS) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for t, c, p, ok in zip(series.times, series.concurrence, series.success_probability, series.defined):
        writer.writerow((_fmt(t, digits), _fmt(c, digits), _fmt(p, digits), 1 if ok else 0))
    return buf.getvalue()


def read_series_csv(path: str) -> SweepSeries:
    """Parse a file written by ``series_to_csv`` back into a series (no metadata)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header!r}")
        rows = [row for row in reader if row]

    times = [float(r[0]) for r in rows]
    concurrence = [float(r[1]) if r[3] == "1" else float("nan") for r in rows]
    success = [float(r[2]) for r in rows]
    return SweepSeries(np.array(times), np.array(concurrence), np.array(success))


def series_to_json(series: SweepSeries, json_provider, *, extra: Optional[dict] = None) -> str:
    """JSON document with metadata, summary and points; undefined concurrence is null."""
    payload = {
        "metadata": dict(series.metadata, **(extra or {})),
        "summary": series.summary(),
        "columns": list(CSV_HEADER),
        "points": [
            {"t_prime": t, "concurrence": c, "bsm_success_prob": p, "defined": c is not None}
            for t, c, p in series.points()
        ],
    }
    return json_provider.dumps(payload, indent=2) + "\n"


def gnuplot_script(curves: Iterable[tuple[str, str]], output: str, title: str = "") -> str:
    """Plot script drawing each ``(csv_file, label)`` as concurrence vs t'.

    Undefined points are written as ``nan`` and gnuplot leaves a gap there.
    """
    lines = [
        "# gnuplot script: concurrence after the Bell-state measurement",
        "set datafile separator \",\"",
        "set terminal pngcairo size 900,600",
        f"set output \"{output}\"",
        "set xlabel \"t'\"",
        "set ylabel \"concurrence\"",
        "set yrange [0:1.05]",
        "set key outside right",
    ]
    if title:
        lines.append(f"set title \"{title}\"")
    plots = [f"\"{name}\" every ::1 using 1:2 with lines title \"{label}\"" for name, label in curves]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"
