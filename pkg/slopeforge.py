#!/usr/bin/env python3
"""
slopeforge command-line entry point.

    python slopeforge.py filtration --in A2
    python slopeforge.py tensor --a diag_1_4 --b diag_1_4 --check-bost
"""
import sys

from src.cli import main

if __name__ == "__main__":
    sys.exit(main())
