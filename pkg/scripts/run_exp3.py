#!/usr/bin/env python3
"""Fused probit on synthetic taxonomy data: group-constant coefficients
with one deviant category, complete-graph smoothing with a learned
cross-group weight."""

import sys

from gapshrink.cli import main

if __name__ == "__main__":
    sys.exit(main(["exp3", *sys.argv[1:]]))
