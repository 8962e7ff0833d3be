#!/usr/bin/env python3
"""Reproduce the headline comb study at two resolutions.

Prints the coefficient-norm vs STFT-norm ratio spreads for the bundled
6-comb corpus over a small exponent grid, at a base grid and its doubling,
so the discretization stability of the equivalence constants is visible at
a glance.

Usage:
    python scripts/reproduce_headline.py
"""

import numpy as np

from tfnorms import comb_entries, periodic_equivalence_study, polynomial_weight


def main():
    combs = [e.comb for e in comb_entries()]
    for label, weight in (("flat", None), ("bracket", polynomial_weight(1, 1))):
        study = periodic_equivalence_study(
            combs,
            qs=[0.5, 1.0, 2.0],
            rs=[0.5, np.inf],
            weight=weight,
            resolutions=((16, 8), (32, 16)),
        )
        print(f"weight = {label}")
        for row in study["spreads"]:
            print(
                f"  res={row['resolution']} q={row['q']} r={row['r']}: "
                f"spread {row['spread_func']:.6f}"
            )


if __name__ == "__main__":
    main()
