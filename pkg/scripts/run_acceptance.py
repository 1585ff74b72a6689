#!/usr/bin/env python3
"""Run the acceptance suite; exits 2 when any check fails."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent))

from lpma_sim.harness.cli import main

if __name__ == "__main__":
    sys.exit(main(["acceptance", *sys.argv[1:]]))
