# Independent oracles for the frozen values in oracle_values.hpp.
# Run with python3; needs numpy, scipy and sympy.
import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

x, y = sp.symbols("x y")
f = [x, y]
g = sp.Matrix(2, 2, lambda i, j: (4 if i == j else 0) / (1 - x**2 - y**2) ** 2)
gi = g.inv()
G = [[[sp.simplify(sum(gi[k, l] * (sp.diff(g[l, i], f[j]) + sp.diff(g[l, j], f[i]) - sp.diff(g[i, j], f[l])) / 2
                       for l in range(2)))
       for j in range(2)] for i in range(2)] for k in range(2)]

u, v = (0.3, -0.7), (1.1, 0.4)
gamma = [float(sum(G[k][i][j].subs({x: 0.5, y: 0.0}) * u[i] * v[j] for i in range(2) for j in range(2)))
         for k in range(2)]
print("poincare christoffel at (0.5, 0), u=(0.3,-0.7), v=(1.1,0.4):", gamma)


def geodesic(t, s):
    p, q = s[:2], s[2:]
    a = [float(sum(G[k][i][j].subs({x: p[0], y: p[1]}) * q[i] * q[j] for i in range(2) for j in range(2)))
         for k in range(2)]
    return [q[0], q[1], -a[0], -a[1]]


# Unit-speed geodesic from the origin along e_x; |v|_g = 2|v| at 0.
for r in (0.5, 0.8):
    length = np.log((1 + r) / (1 - r))
    sol = solve_ivp(geodesic, [0, length], [0, 0, 0.5, 0], rtol=1e-12, atol=1e-14)
    print(f"shooting: length {length!r} reaches x = {sol.y[0, -1]!r} (expected {r})")

print("snapshot bytes N=16 K=3:", 24 + 3 * 16**3 * 8)
print("tau2 inverse of (0.2, 1.3, 0.4):", (0.2, 0.3, round((0.4 - 0.2) % 1, 15)))
print("E_H of the standard torus map:", 0.5 * ((2 * np.pi) ** 2 * 0.5 + (2 * np.pi) ** 2 * 0.5))
print("clifford distance for a pi shift in one angle:", np.pi / np.sqrt(2))
