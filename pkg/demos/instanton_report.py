"""Primed determinant of the finite-period double-well instanton.

For several periods T the closed form, the numerical zero-mode route and
the large-T asymptote exp(omega T)/(24 omega^3) are printed side by side;
the ratio to the harmonic reference sinh(omega T)/omega tends to 1/12.
"""

import math

from gydet import Instanton, instanton_geometry, instanton_primed_det, m_for_period, primed_det
from gydet.models import instanton_large_t, instanton_ratio

omega, a = 1.0, 1.0
print(f"{'T':>6}{'m':>20}{'Det closed':>16}{'Det numeric':>16}{'asymptote':>14}{'ratio':>10}")
for T in (6.0, 8.0, 12.0, 16.0, 20.0, 24.0):
    geo = instanton_geometry(omega, a, m_for_period(omega, a, T))
    closed = instanton_primed_det(geo)
    numeric = primed_det(Instanton(omega, a, geo.m), geo.window(), "dirichlet").value
    print(
        f"{T:6.1f}{geo.m:20.15f}{closed:16.8g}{numeric:16.8g}"
        f"{instanton_large_t(omega, T):14.6g}{instanton_ratio(geo):10.6f}"
    )
print(f"limit 1/12 = {1 / 12:.6f}")
