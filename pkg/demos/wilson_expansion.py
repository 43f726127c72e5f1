"""Laguerre coefficients of the Wilson-type functions F_n and their Parseval sums."""
import numpy as np

from klorth.wilsongen import WilsonParams, f_norm, laguerre_expansion, wilson_m0_closed

params = WilsonParams((0.6, 0.8, 1.0))
print("total mass:", wilson_m0_closed(params))

for n in range(3):
    exp = laguerre_expansion(n, params, K=30)
    parseval = float(np.sum(exp.coefficients ** 2))
    norm2 = f_norm(n, params) ** 2
    print(f"n={n}  c_0..c_4 = {np.array2string(exp.coefficients[:5], precision=6)}")
    print(f"      sum c_k^2 = {parseval:.10f}  ||F_n||^2 = {norm2:.10f}  tail <= {exp.tail_bound:.1e}")
