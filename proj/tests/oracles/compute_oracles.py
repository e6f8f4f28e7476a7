"""High-precision reference values frozen into the C++ tests.

Run with `python3 tests/oracles/compute_oracles.py`; every number printed here
is evaluated from the defining expressions in 60-digit arithmetic and is
independent of the library code.
"""
from fractions import Fraction

import mpmath as mp

mp.mp.dps = 60


def varphi_exact(n, r):
    falling = Fraction(1)
    for k in range(r):
        falling *= n - k
    return n * (1 - falling / Fraction(n) ** r)


def delta(n, r, x):
    n, r, x = mp.mpf(n), mp.mpf(r), mp.mpf(x)
    return n * ((1 - x / n) ** (n - r) - mp.e ** (-x))


def delta_star(n, r, x):
    n, r, x = mp.mpf(n), mp.mpf(r), mp.mpf(x)
    return n * (delta(n, r, x) - mp.e ** (-x) * x * (r - x / 2))


def equi_mean0(N, n):
    return (1 - mp.mpf(1) / N) ** n


def equi_var0(N, n):
    # Var of the empty-box proportion from the indicator algebra of N-hat_0.
    N = mp.mpf(N)
    e1 = N * (1 - 1 / N) ** n
    e2 = N * (N - 1) * (1 - 2 / N) ** n
    return (e1 + e2 - e1 * e1) / (N * N)


def show(label, value):
    print(f"{label} = {mp.nstr(value, 20)}")


show("varphi(10,4)", varphi_exact(10, 4))
show("varphi_star(10,4)", 10 * (6 - varphi_exact(10, 4)))
show("delta(4,4,1)", delta(4, 4, 1))
show("delta(100,0,1)", delta(100, 0, 1))
show("delta_star(100,0,1)", delta_star(100, 0, 1))
show("delta_star(50,2,1)", delta_star(50, 2, 1))
show("mean0(N=100,n=100)", equi_mean0(100, 100))
a = mp.mpf(1)
lead = mp.e ** (-a)
corr = -a * a * mp.e ** (-a) / 200
show("approx0 leading", lead)
show("approx0 correction", corr)
show("approx0 sum", lead + corr)
show("R1(N=100,n=100,r=0)", 100 ** 2 * (equi_mean0(100, 100) - lead - corr))
show("var corr (alpha=1,n=100)", (mp.e ** -1 - 2 * mp.e ** -2) / 100)
show("R0(N=100,n=50,r=0)", 50 * (equi_mean0(100, 50) - mp.e ** (-mp.mpf(0.5))))
show("R1(N=4,n=1,r=0)", (mp.mpf(3) / 4 - mp.e ** (-mp.mpf(1) / 4) * (1 - mp.mpf(1) / 32)))

print("# figure-1 grid: n, mean residual n^2*(E - approx), variance residual n^2*(V - approx)")
for n in range(10, 101, 5):
    al = mp.mpf(n) / 100
    m_app = mp.e ** (-al) - al * al * mp.e ** (-al) / (2 * n)
    v_app = (al * mp.e ** (-al) - al * mp.e ** (-2 * al) - al * al * mp.e ** (-2 * al)) / n
    print(n, mp.nstr(n * n * (equi_mean0(100, n) - m_app), 17),
          mp.nstr(n * n * (equi_var0(100, n) - v_app), 17))
