#!/usr/bin/env python3
"""Reproduce the Fig. 2 emissivity map: 4-period inverted opal on an
absorptive backplane, E(omega, theta) heatmaps per polarization."""

import sys

from pcfilm.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/fig2"
    threads = sys.argv[2] if len(sys.argv) > 2 else "1"
    sys.exit(main(["sweep", "--preset", "paper-fig2", "--out", out, "--threads", threads]))
