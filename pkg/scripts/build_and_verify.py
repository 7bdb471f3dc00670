#!/usr/bin/env python3
"""Build the default tree, export the cache, and run every verification suite."""

import sys

from lprl.cli import main

if __name__ == "__main__":
    rc = main(["build", *sys.argv[1:]])
    if rc == 0:
        rc = main(["verify", *sys.argv[1:]])
    sys.exit(rc)
