"""
Figure batch job — regenerates the data and plot scripts of all five figures.
Usage: python -m jobs.reproduce_figures [output_dir]

Figures 4 and 5 sweep t' up to 400 and dominate the runtime.
"""

import os
import sys
import time

# Add project root to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app import create_app
from app.cli.commands import export_figure
from app.errors import SimulationError
from app.experiments.figures import FIGURES

DEFAULT_OUTPUT_DIR = "figures"


def run(output_dir: str = DEFAULT_OUTPUT_DIR) -> int:
    app = create_app()
    with app.app_context():
        print(f"[JOB] Writing {len(FIGURES)} figures to {output_dir}/ (step {app.config['T_STEP']})")
        failures = 0
        for figure_id in FIGURES:
            started = time.perf_counter()
            try:
                paths = export_figure(figure_id, output_dir, app_config=app.config)
            except SimulationError as exc:
                failures += 1
                print(f"[JOB] Figure {figure_id} failed: {exc}")
                continue
            elapsed = time.perf_counter() - started
            print(f"[JOB] Figure {figure_id}: {len(paths) - 1} curve(s) in {elapsed:.1f}s")
            for path in paths:
                print(f"  - {path}")

        if failures:
            print(f"[JOB] Done with {failures} failed figure(s).")
            return 2
        print("[JOB] Done.")
        return 0


if __name__ == "__main__":
    sys.exit(run(*sys.argv[1:2]))
