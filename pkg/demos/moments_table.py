"""Moments mu_n(x) by three independent quadrature routes, side by side."""
import numpy as np

from klorth.moments import MomentRoute, mu, mu_closed

routes = (MomentRoute.COSH, MomentRoute.LAPLACE, MomentRoute.DIRECT)

for x in (0.5, 1.0, 2.0):
    print(f"x = {x}")
    for n in range(6):
        vals = [mu(n, x, r) for r in routes]
        spread = (max(vals) - min(vals)) / abs(vals[0])
        line = "  ".join(f"{v:.16e}" for v in vals)
        print(f"  n={n}  {line}  spread={spread:.1e}")
    print(f"  closed forms n=0,1: {mu_closed(0, x):.16e} {mu_closed(1, x):.16e}")
    print()

# the moment sequence is log-convex, as it must be for a positive weight
m = np.array([mu(n, 1.0) for n in range(8)])
print("log-convex at x=1:", bool(np.all(m[1:-1] ** 2 <= m[:-2] * m[2:])))
