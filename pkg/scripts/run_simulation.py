#!/usr/bin/env python3
"""Run any simulator subcommand, e.g. `run_simulation.py simulate --config configs/equal_gain_lte.json`."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from lpma_sim.harness.cli import main

if __name__ == "__main__":
    sys.exit(main())
