#!/usr/bin/env python3
"""Thin launcher; see wpsplot.cli for the interface."""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(os.path.abspath(__file__)), "src"))

from wpsplot.cli import main

if __name__ == "__main__":
    sys.exit(main())
