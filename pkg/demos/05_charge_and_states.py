"""Leapfrog evolution with a conserved charge, then state diagnostics on the field."""
import numpy as np

from qubitfield import diagnostics as diag
from qubitfield.dynamics import charge_run
from qubitfield.lattice import Lattice, Mode, analytic_gradients, harmonic_scalar
from qubitfield.operators import QubitTriple


def wave(lat):
    return harmonic_scalar(lat, [Mode(0.3, 2 * np.pi, 1)], slope_x=2.0, slope_t=-2.0)


devs = []
for n in (32, 64, 128):
    lat = Lattice(4, n, 0.5 / n, 1.0 / n)
    run = charge_run(lat, wave(lat))
    devs.append(run.continuum_deviation)
    print(f"n={n:4d}  self drift {run.self_drift:.1e}  distance to continuum {run.continuum_deviation:.3e}")
print("orders:", np.log2(np.array(devs[:-1]) / np.array(devs[1:])).round(3))

lat = Lattice(4, 64, 1 / 128, 1 / 64)
q = analytic_gradients(wave(lat)).q
site = QubitTriple(q[1, 10])
for name, rho in [("product", diag.product_state(site, (0, 0, 1))), ("bell", diag.bell_state(site))]:
    _, norm = diag.entanglement_witness(rho, site)
    print(f"{name:8s} witness {norm:.3e}  Bloch {diag.bloch_vector(rho, site).round(6)}")
