#!/usr/bin/env python3
"""Trace the block table of a sample path with one bad row.

Shows the per-block q-costs shrinking geometrically while the cumulative
power sum at the bad row's exponent crosses successive thresholds.
"""

import sys

from lprl.cli import main

if __name__ == "__main__":
    args = sys.argv[1:] or ["--spec", "row=0:eventually(0)", "--k", "8"]
    sys.exit(main(["trace", *args]))
