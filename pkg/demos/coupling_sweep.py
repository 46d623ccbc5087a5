"""How weak is weak enough: estimate bias versus coupling strength.

The conditioned readout equals the weak value only to first order in the
coupling.  Sweeping gA_tA in exact-moments mode (no shot noise) isolates
that systematic error; it should fall off quadratically.
"""
from dataclasses import replace

import numpy as np

from weakmeas import cli, scenario

sc = scenario.preset("qubit-theta30")
sc = replace(sc, run=replace(sc.run, mode="exact-moments"))

couplings = [0.01, 0.02, 0.05, 0.1, 0.2]
text = cli.sweep_csv(sc, "gA_tA", couplings)
print(text)

rows = [line.split(",") for line in text.strip().split("\n")[1:]]
errors = [float(r[6]) for r in rows]
slope = np.polyfit(np.log(couplings), np.log(errors), 1)[0]
print(f"log-log slope of the bias: {slope:.3f}  (2 means O(g^2))")
