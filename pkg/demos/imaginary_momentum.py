"""A purely imaginary weak value leaves the pointer position alone.

With A=sigma_x, I=|0> and F=(|0>+i|1>)/sqrt(2) the weak value is -i.  The
position of the A pointer shows nothing; the information moved into its
momentum.  Sampling both readouts of the same scenario makes that visible.
"""
from dataclasses import replace

from weakmeas import estimator, scenario, weakvalues

sc = scenario.preset("imaginary-sigma-x")
sc = replace(sc, run=replace(sc.run, samples=200000))

print("weak value:", weakvalues.weak_value(sc.a_matrix, sc.i_vector, sc.f_vector))
print()

for readout in ("position", "momentum"):
    probe = replace(sc, run=replace(sc.run, readout=readout))
    summary = estimator.summarize(
        estimator.sample_records(probe, probe.run.samples), probe
    )
    part = "Re" if readout == "position" else "Im"
    print(f"{readout:8s} readout -> {part} A_w estimate "
          f"{summary.estimate:+.4f} +- {summary.std_error:.4f}")
