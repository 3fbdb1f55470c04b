#!/usr/bin/env python3
"""Randomized certification of the gap machinery: weak-duality
nonnegativity, the strong-convexity and KL distance bounds, and zero gap
at oracle optima."""

import sys

from gapshrink.cli import main

if __name__ == "__main__":
    sys.exit(main(["gap-check", *sys.argv[1:]]))
