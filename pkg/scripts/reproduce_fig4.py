#!/usr/bin/env python3
"""Reproduce Fig. 4: complex band structure of the lossless eps1 = 22
crystal (left panel) and the matching 8-period transmission (right)."""

import sys

from pcfilm.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/fig4"
    code = main(["band", "--preset", "paper-fig4", "--out", out])
    if code == 0:
        code = main(["spectrum", "--preset", "paper-fig4", "--out", out])
    sys.exit(code)
