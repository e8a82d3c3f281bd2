"""Tabulate Dirichlet and periodic Green functions of a Mathieu-type operator."""

import numpy as np

from gydet import Expression, TimeWindow, gy_basis, green

pair = gy_basis(Expression("1.3 + 0.4*cos(2*t)"), 1.0, TimeWindow(0.0, np.pi))
ts = np.linspace(0.0, np.pi, 7)
for bc in ("dirichlet", "periodic", "antiperiodic"):
    print(f"{bc}: G(t, pi/2)")
    for t, g in zip(ts, green(pair, bc, ts, np.pi / 2)):
        print(f"  t={t:6.3f}  {g: .10f}")
