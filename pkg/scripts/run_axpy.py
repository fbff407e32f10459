#!/usr/bin/env python3
"""Convenience wrapper for the accumulation benchmark CLI.

Equivalent to the installed ``axpy`` entry point:

    python3 scripts/run_axpy.py --lanes f16,f32,u3.4,u4.5 --out axpy.csv
"""

import sys

from unumkit.axpy import main

if __name__ == "__main__":
    sys.exit(main())
