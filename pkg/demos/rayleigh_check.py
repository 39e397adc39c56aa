"""Sanity check in the Rayleigh corner, where everything is elementary.

With exponential SNRs the exact outage has a closed form:
    1 - g_d / (g_d + lam g_e) * exp(-(lam - 1) / g_d).
The library's Rayleigh closed form is the second-order moment expansion. It
is compared against that exact expression, the quadrature and Monte-Carlo.
"""

import math

from gk_secrecy import GkParams, McConfig, SecrecyScenario, sop_exact, sop_mc, sop_rayleigh

g_d, g_e, rs = 10.0, 1.0, 1.0
lam = 2.0**rs
exact = 1 - g_d / (g_d + lam * g_e) * math.exp(-(lam - 1) / g_d)

# A huge k with m = 1 is the library's route to the Rayleigh law.
s = SecrecyScenario(GkParams(500.0, 1.0, g_d), GkParams(500.0, 1.0, g_e), rs)
mc = sop_mc(s, McConfig(samples=2_000_000, seed=7))

print(f"closed-form exact     {exact:.7f}")
print(f"quadrature            {sop_exact(s).value:.7f}")
print(f"moment expansion      {sop_rayleigh(g_d, g_e, rs).value:.7f}")
print(f"Monte-Carlo           {mc.estimate:.7f} +/- {mc.stderr:.1e}")

# The expansion keeps the second-order term with a plus sign inside the
# bracket: 1 - [1 + (lam g_e / g_d)^2 / 2] exp(-w / g_d). With the opposite
# sign it would land near 0.274, well outside the Monte-Carlo error bar.
