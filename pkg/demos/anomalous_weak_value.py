"""Closed-form tour of the theta=30deg qubit preset.

Pre-selection at +30deg from the z axis, post-selection at -30deg, observable
sigma_z.  The post-selected ratio lands at 2.0 even though sigma_z only has
eigenvalues +-1.
"""
import numpy as np

from weakmeas import pointer, scenario, weakvalues

sc = scenario.preset("qubit-theta30")

wv = weakvalues.weak_value(sc.a_matrix, sc.i_vector, sc.f_vector)
rep = weakvalues.commutation_report(sc.a_matrix, sc.i_vector, sc.f_vector)

print("observable eigenvalues:", np.linalg.eigvalsh(sc.a_matrix))
print("weak value:            ", wv)
print("real-part formula:     ", rep.re_formula)
print("imag-part formula:     ", rep.im_formula)
print("post-selection prob:   ", rep.postselect_prob)
print()
print("the anomaly needs non-commutation; the report quantifies it:")
for name, norm in rep.commutator_norms.items():
    print(f"  |{name}| = {norm:.6f}")
print()

# a strongly coupled device would read the ordinary mean <A> = 0.5; the
# weakly coupled device, conditioned on the rare outcome, drifts at A_w
device = weakvalues.naive_device_state(
    sc.a_matrix, sc.i_vector, sc.f_vector, sc.ga_ta, sc.grid_a()
)
moments = pointer.moments(device)
print("first-order device mean / gA_tA:", moments.mean_x / sc.ga_ta)
print("plain expectation <I|A|I>:      ",
      np.real(np.vdot(sc.i_vector, sc.a_matrix @ sc.i_vector)))
