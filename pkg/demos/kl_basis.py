"""Orthonormal polynomials for the weight |K_{i tau}(x)|^2 and a quadrature check."""
import numpy as np

from klorth.orthokl import WeightSpec, basis_for, inner_product, three_term_residual

spec = WeightSpec.kl(1.0)
basis = basis_for(spec, 5)

np.set_printoptions(precision=6, suppress=False, linewidth=110)
print("coefficients of P_n in u = tau^2 (row n, ascending powers):")
print(basis.coeffs)
print("A_n:", basis.rec_A[1:])
print("B_n:", basis.rec_B)

# Gram matrix by direct quadrature over tau, independent of the moments
N = 4
G = np.array([[inner_product(basis.poly(m), basis.poly(n), spec, route="direct")
               for n in range(N + 1)] for m in range(N + 1)])
print("max |G - I| by quadrature:", np.abs(G - np.eye(N + 1)).max())
print("three-term residuals:", [f"{three_term_residual(basis, n):.1e}" for n in range(1, N)])
