#!/usr/bin/env python3
"""Sparse regression study at paper scale: n=200, p=500, five-signal truth,
gap-shrinkage vs Bayesian lasso vs double-Pareto, 1000+1000 iterations."""

import sys

from gapshrink.cli import main

if __name__ == "__main__":
    sys.exit(main(["exp1", *sys.argv[1:]]))
