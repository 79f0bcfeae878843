#!/usr/bin/env python3
"""Reproduce the Fig. 3 curves: 16-period 1D film on the absorptive
backplane, emissivity spectra at several angles from normal."""

import sys

from pcfilm.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/fig3"
    code = main(["spectrum", "--preset", "paper-fig3", "--out", out])
    if code == 0:
        code = main(["sweep", "--preset", "paper-fig3", "--out", out])
    sys.exit(code)
