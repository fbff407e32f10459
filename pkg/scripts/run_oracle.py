#!/usr/bin/env python3
"""Convenience wrapper for the brute-force verification CLI.

Equivalent to the installed ``oracle`` entry point:

    python3 scripts/run_oracle.py --env 2,2 --suite all
"""

import sys

from unumkit.oracle import main

if __name__ == "__main__":
    sys.exit(main())
