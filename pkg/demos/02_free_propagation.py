"""Free propagation on the periodic box: unitarity and dispersive decay.

The free group multiplies each Fourier coefficient by exp(+i t |xi|^2); on a
Gaussian the evolution has a closed form, and the sup norm decays like
t^(-n/2), which we recover from a log-log fit.
"""
import numpy as np

from strz import dispersive_decay_fit, free_propagate, gaussian_field, lq_norm, make_grid

grid = make_grid(1, 20.0, 512)
u0 = gaussian_field(grid, sigma=1.0)

print("== closed-form check: exp(it Lap) on a Gaussian ==")
x = grid.axis()
for t in (0.25, 1.0):
    a = 1.0 - 2j * t
    exact = a ** (-0.5) * np.exp(-(x**2) / (2.0 * a))
    ut = free_propagate(u0, t)
    err = np.sqrt(np.sum(np.abs(ut.values - exact) ** 2) * grid.cell_volume)
    print(f"  t = {t}: L2 error vs closed form = {err:.3e}")

print("\n== unitarity: the multiplier has modulus one ==")
n0 = lq_norm(u0, 2)
for t in (0.5, 5.0, 50.0):
    print(f"  t = {t:5}: ||u(t)||_2 / ||u0||_2 - 1 = {lq_norm(free_propagate(u0, t), 2)/n0 - 1:+.3e}")

print("\n== dispersive decay: sup-norm slope vs -n/2 ==")
for n, N in ((1, 1024), (2, 512)):
    g = make_grid(n, 48.0, N)
    fit = dispersive_decay_fit(gaussian_field(g, sigma=0.5), (0.5, 4.0))
    print(f"  n = {n}: fitted slope {fit.slope:+.4f} (target {-n/2})")
