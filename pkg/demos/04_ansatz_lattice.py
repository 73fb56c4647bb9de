"""The swap-power ansatz on a lattice: exact solution, FD convergence, and the type-I no-go."""
import numpy as np

from qubitfield.lattice import (
    ANSATZ_LAMBDA,
    Lattice,
    Mode,
    analytic_gradients,
    best_mass_residual,
    eom_residual,
    fd_gradients,
    harmonic_scalar,
    standing_wave,
)

errs = []
for n in (32, 64, 128):
    lat = Lattice(n, n, 0.5 / n, 1.0 / n)
    phi = standing_wave(lat)
    exact = analytic_gradients(phi)
    fd = fd_gradients(lat, exact.q)
    errs.append(eom_residual(fd.q, fd.box, ANSATZ_LAMBDA).max())
    print(f"n={n:4d}  analytic residual {eom_residual(exact.q, exact.box, ANSATZ_LAMBDA).max():.1e}"
          f"  FD residual {errs[-1]:.3e}  best type-I fit {best_mass_residual(exact.q, exact.box)[1]:.1f}")
print("FD orders:", np.log2(np.array(errs[:-1]) / np.array(errs[1:])).round(3))

# a single travelling mode is null, so even box q vanishes
lat = Lattice(32, 32, 1 / 64, 1 / 32)
g = analytic_gradients(harmonic_scalar(lat, [Mode(0.4, 2 * np.pi, 1)]))
print("travelling mode, max |box q|:", np.abs(g.box).max())
