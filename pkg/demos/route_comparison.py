"""Compare the three determinant routes on a smooth periodic profile.

Run with ``python3 demos/route_comparison.py``.
"""

from gydet import Expression, TimeWindow, det_ratio, det_ratio_fd, det_ratio_homotopy

profile = Expression("1 + 0.5*cos(2*pi*t)")
window = TimeWindow(0.0, 1.0)

print(f"{'bc':<13}{'gy':>20}{'homotopy':>20}{'fd N=2000':>20}")
for bc in ("dirichlet", "periodic", "antiperiodic"):
    gy = det_ratio(profile, window, bc, omega_ref=1.0).value
    hom = det_ratio_homotopy(profile, window, bc, omega_ref=1.0, n_g=32).value
    fd = det_ratio_fd(profile, window, bc, omega_ref=1.0, N=2000)
    print(f"{bc:<13}{gy:20.12f}{hom:20.12f}{fd:20.12f}")

print("\nfd error under grid doubling (Dirichlet):")
exact = det_ratio(profile, window, "dirichlet").value
prev = None
for n in (250, 500, 1000, 2000, 4000):
    err = abs(det_ratio_fd(profile, window, "dirichlet", N=n) - exact)
    ratio = "" if prev is None else f"  ratio {prev / err:.3f}"
    print(f"  N={n:<5d} error {err:.3e}{ratio}")
    prev = err
